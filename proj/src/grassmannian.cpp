#include "kmlift/grassmannian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace kmlift {

namespace {

struct OrthoPiece {
    LatticeVector vector;
    Rational norm;
};

bool has_exact_root(const Rational& r) {
    const Rational a = r < 0 ? Rational(-r) : r;
    return rational_sqrt(a).has_value() || rational_sqrt(Rational(a / 2)).has_value();
}

/// Symmetric Gram-Schmidt with pivoting over Q: an orthogonal basis of span(vs) with nonzero norms.
std::vector<OrthoPiece> diagonalize(const GramLattice& lattice, std::vector<LatticeVector> vs) {
    std::vector<OrthoPiece> out;
    auto is_zero = [](const LatticeVector& v) {
        return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
    };
    while (true) {
        vs.erase(std::remove_if(vs.begin(), vs.end(), is_zero), vs.end());
        if (vs.empty()) break;
        std::size_t pick = vs.size();
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const Rational n = lattice.norm(vs[i]);
            if (n == 0) continue;
            if (pick == vs.size()) pick = i;
            if (has_exact_root(n)) {
                pick = i;
                break;
            }
        }
        if (pick == vs.size()) {
            bool merged = false;
            for (std::size_t i = 0; i < vs.size() && !merged; ++i)
                for (std::size_t j = i + 1; j < vs.size() && !merged; ++j)
                    if (lattice.pairing(vs[i], vs[j]) != 0) {
                        for (std::size_t r = 0; r < vs[i].size(); ++r) vs[i][r] += vs[j][r];
                        merged = true;
                    }
            if (!merged) throw Error(ErrorKind::Degenerate, "degenerate subspace in base frame construction");
            continue;
        }
        OrthoPiece piece{vs[pick], lattice.norm(vs[pick])};
        vs.erase(vs.begin() + static_cast<long>(pick));
        for (auto& v : vs) {
            const Rational c = lattice.pairing(v, piece.vector) / piece.norm;
            for (std::size_t r = 0; r < v.size(); ++r) v[r] -= c * piece.vector[r];
        }
        out.push_back(std::move(piece));
    }
    return out;
}

template <class T>
std::vector<T> normalized(const OrthoPiece& piece) {
    const Rational a = piece.norm < 0 ? Rational(-piece.norm) : piece.norm;
    const T inv = FieldTraits<T>::one() / FieldTraits<T>::sqrt(FieldTraits<T>::from_rational(a));
    std::vector<T> out;
    for (const auto& x : piece.vector) out.push_back(FieldTraits<T>::from_rational(x) * inv);
    return out;
}

template <class T>
std::vector<T> convert(const LatticeVector& v) {
    return map_vector<T>(v, [](const Rational& r) { return FieldTraits<T>::from_rational(r); });
}

template <class T>
Matrix<T> convert(const Matrix<Rational>& m) {
    return m.template map<T>([](const Rational& r) { return FieldTraits<T>::from_rational(r); });
}

template <class T>
double to_d(const T& v) {
    return FieldTraits<T>::to_double(v);
}

template <class T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(to_d(a[i]) - to_d(b[i])));
    return m;
}

}  // namespace

template <class T>
BaseFrame<T> make_base_frame(const GramLattice& lattice, const SplitData* split) {
    const std::size_t n = lattice.rank();
    const Signature sig = lattice.signature();
    std::vector<LatticeVector> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        LatticeVector e(n, Rational(0));
        e[i] = 1;
        candidates.push_back(e);
    }
    BaseFrame<T> base;
    base.p = sig.p;
    base.q = sig.q;
    base.basis = Matrix<T>(n, n);
    std::vector<std::vector<T>> pos, neg;
    if (split) {
        const LatticeVector& u = split->u;
        const LatticeVector u2 = split->u_double_prime();
        for (auto& x : candidates) {
            const Rational a = lattice.pairing(x, u2), b = lattice.pairing(x, u);
            for (std::size_t r = 0; r < n; ++r) x[r] -= a * u[r] + b * u2[r];
        }
        for (const auto& piece : diagonalize(lattice, candidates))
            (piece.norm > 0 ? pos : neg).push_back(normalized<T>(piece));
        LatticeVector plus(n), minus(n);
        for (std::size_t r = 0; r < n; ++r) {
            plus[r] = u[r] + u2[r];
            minus[r] = u[r] - u2[r];
        }
        pos.push_back(normalized<T>({plus, Rational(2)}));
        neg.push_back(normalized<T>({minus, Rational(-2)}));
    } else {
        for (const auto& piece : diagonalize(lattice, candidates))
            (piece.norm > 0 ? pos : neg).push_back(normalized<T>(piece));
    }
    if (static_cast<int>(pos.size()) != sig.p || static_cast<int>(neg.size()) != sig.q)
        throw Error(ErrorKind::Degenerate, "base frame does not match the signature");
    std::size_t col = 0;
    for (const auto& v : pos) base.basis.set_column(col++, v);
    for (const auto& v : neg) base.basis.set_column(col++, v);
    return base;
}

GrassPoint grass_point(const GramLattice& lattice, const Matrix<double>& neg_basis) {
    const std::size_t n = lattice.rank();
    if (neg_basis.rows() != n || static_cast<int>(neg_basis.cols()) != lattice.signature().q)
        throw Error(ErrorKind::DimensionMismatch, "z basis must have q columns of length rank");
    const Matrix<double> g = lattice.gram_double();
    const Matrix<double> zg = neg_basis.transpose() * g * neg_basis;
    Matrix<double> minus = zg;
    for (std::size_t i = 0; i < minus.rows(); ++i)
        for (std::size_t j = 0; j < minus.cols(); ++j) minus(i, j) = -zg(i, j);
    try {
        cholesky(minus);
    } catch (const Error&) {
        throw Error(ErrorKind::NotNegativeDefinite, "z basis is not negative definite");
    }
    Eigen::MatrixXd z(n, neg_basis.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < neg_basis.cols(); ++j) z(i, j) = neg_basis(i, j);
    if (neg_basis.cols() > 0) {
        const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(z).singularValues();
        if (s.minCoeff() <= 0 || s.maxCoeff() / s.minCoeff() > 1e8)
            throw Error(ErrorKind::DegenerateFrame, "z basis condition number exceeds 1e8");
    }
    return GrassPoint{neg_basis};
}

Matrix<double> majorant_matrix(const GramLattice& lattice, const GrassPoint& z) {
    // (v,v)_z = (v,v) - 2 (v_z, v_z) with v_z = Z (Z^T G Z)^{-1} Z^T G v
    const Matrix<double> g = lattice.gram_double();
    const Matrix<double>& zb = z.neg_basis;
    const Matrix<double> gz = g * zb;
    const Matrix<double> inner = inverse(Matrix<double>(zb.transpose() * gz));
    const Matrix<double> proj_form = gz * inner * gz.transpose();
    Matrix<double> out = g;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = g(i, j) - 2.0 * proj_form(i, j);
    return out;
}

double majorant(const GramLattice& lattice, const GrassPoint& z, const std::vector<double>& v) {
    return bilinear(majorant_matrix(lattice, z), v, v);
}

template <class T>
T isometry_defect(const GramLattice& lattice, const Isometry<T>& g) {
    const Matrix<T> gram = convert<T>(lattice.gram_rational());
    const Matrix<T> d = g.matrix.transpose() * gram * g.matrix - gram;
    T worst = FieldTraits<T>::zero();
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) {
            const T a = FieldTraits<T>::abs(d(i, j));
            if (worst < a) worst = a;
        }
    return worst;
}

Isometry<double> isometry_to_base(const GramLattice& lattice, const BaseFrame<double>& base, const GrassPoint& z) {
    const std::size_t n = lattice.rank();
    const int p = base.p, q = base.q;
    const Matrix<double> g = lattice.gram_double();
    auto pair = [&](const std::vector<double>& a, const std::vector<double>& b) { return bilinear(g, a, b); };
    std::vector<std::vector<double>> neg;
    for (int j = 0; j < q; ++j) {
        std::vector<double> v = z.neg_basis.column(j);
        for (const auto& f : neg) v = axpy(v, pair(v, f), f);  // f has norm -1
        const double nv = pair(v, v);
        if (!(nv < 0)) throw Error(ErrorKind::NotNegativeDefinite, "z basis is not negative definite");
        neg.push_back(scaled(v, 1.0 / std::sqrt(-nv)));
    }
    std::vector<std::vector<double>> pos;
    for (int j = 0; j < p; ++j) {
        std::vector<double> v = base.basis.column(j);
        for (const auto& f : neg) v = axpy(v, pair(v, f), f);
        for (const auto& f : pos) v = axpy(v, -pair(v, f), f);
        const double nv = pair(v, v);
        if (!(nv > 1e-14)) throw Error(ErrorKind::DegenerateFrame, "positive complement of z is degenerate");
        pos.push_back(scaled(v, 1.0 / std::sqrt(nv)));
    }
    Matrix<double> f(n, n);
    for (int j = 0; j < p; ++j) f.set_column(j, pos[j]);
    for (int j = 0; j < q; ++j) f.set_column(p + j, neg[j]);
    Matrix<double> m = base.basis * inverse(f);
    if (determinant(m) < 0) {
        f.set_column(0, scaled(pos[0], -1.0));
        m = base.basis * inverse(f);
    }
    return Isometry<double>{m};
}

template <class T>
Matrix<T> Frame<T>::coordinate_map() const {
    Matrix<T> a = vectors.transpose() * gram;
    for (std::size_t j = 0; j < a.rows(); ++j)
        if (sign(static_cast<int>(j)) < 0)
            for (std::size_t c = 0; c < a.cols(); ++c) a(j, c) = -a(j, c);
    return a;
}

template <class T>
Matrix<T> Frame<T>::majorant_gram() const {
    const Matrix<T> gf = gram * vectors;
    return gf * gf.transpose();
}

template <class T>
GrassPoint Frame<T>::grass_point() const {
    Matrix<double> z(vectors.rows(), q);
    for (std::size_t i = 0; i < vectors.rows(); ++i)
        for (int j = 0; j < q; ++j) z(i, j) = to_d(vectors(i, p + j));
    return GrassPoint{z};
}

template <class T>
Frame<T> make_frame(const GramLattice& lattice, const BaseFrame<T>& base, const Isometry<T>& g) {
    Frame<T> f;
    f.gram = convert<T>(lattice.gram_rational());
    f.vectors = solve(g.matrix, base.basis);
    f.p = base.p;
    f.q = base.q;
    return f;
}

template <class T>
std::vector<T> SplitFrame<T>::sharp_preimage(const std::vector<T>& v) const {
    std::vector<T> vz(v.size(), FieldTraits<T>::zero());
    for (int j = p; j < p + q; ++j) vz = axpy(vz, T(-pairing(v, frame.vectors.column(j))), frame.vectors.column(j));
    std::vector<T> vzp = v;
    for (std::size_t i = 0; i < v.size(); ++i) vzp[i] -= vz[i];
    const std::vector<T> wperp = axpy(vzp, T(-pairing(v, u_perp) / u_perp_norm), u_perp);
    const std::vector<T> w = axpy(vz, T(-pairing(v, u_z) / u_z_norm), u_z);
    std::vector<T> out = wperp;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += w[i];
    return out;
}

template <class T>
T SplitFrame<T>::w_perp_norm(const std::vector<T>& v) const {
    const std::vector<T> x = sharp * v;
    T s = FieldTraits<T>::zero();
    for (int j = 0; j < p; ++j) s += x[j] * x[j];
    return s;
}

template <class T>
T SplitFrame<T>::w_perp_norm_K(const std::vector<T>& s) const {
    const std::vector<T> x = k_images * s;
    T out = FieldTraits<T>::zero();
    for (int j = 0; j < p; ++j) out += x[j] * x[j];
    return out;
}

template <class T>
SplitFrame<T> make_split_frame(const SplitData& sd, const BaseFrame<T>& base, const Isometry<T>& g) {
    SplitFrame<T> sf;
    sf.frame = make_frame(sd.lattice, base, g);
    sf.p = base.p;
    sf.q = base.q;
    const std::size_t n = sd.lattice.rank();
    sf.u = convert<T>(sd.u);
    sf.u_z = std::vector<T>(n, FieldTraits<T>::zero());
    for (int j = sf.p; j < sf.p + sf.q; ++j) {
        const std::vector<T> f = sf.frame.vectors.column(j);
        sf.u_z = axpy(sf.u_z, T(-sf.pairing(sf.u, f)), f);
    }
    sf.u_perp = sf.u;
    for (std::size_t i = 0; i < n; ++i) sf.u_perp[i] -= sf.u_z[i];
    sf.u_perp_norm = sf.pairing(sf.u_perp, sf.u_perp);
    sf.u_z_norm = sf.pairing(sf.u_z, sf.u_z);
    if (!(to_d(sf.u_perp_norm) > 1e-12) || !(to_d(sf.u_z_norm) < -1e-12))
        throw Error(ErrorKind::DegenerateFrame, "u has a vanishing projection");
    const T two = FieldTraits<T>::from_rational(Rational(2));
    sf.mu = scaled(convert<T>(sd.u_prime), T(-FieldTraits<T>::one()));
    sf.mu = axpy(sf.mu, T(FieldTraits<T>::one() / (two * sf.u_perp_norm)), sf.u_perp);
    sf.mu = axpy(sf.mu, T(FieldTraits<T>::one() / (two * sf.u_z_norm)), sf.u_z);

    const Matrix<T> coords = sf.frame.coordinate_map();
    sf.sharp = Matrix<T>(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<T> e(n, FieldTraits<T>::zero());
        e[i] = FieldTraits<T>::one();
        sf.sharp.set_column(i, coords * sf.sharp_preimage(e));
    }
    sf.gu_pairings.clear();
    for (std::size_t j = 0; j < n; ++j) sf.gu_pairings.push_back(sf.pairing(sf.u, sf.frame.vectors.column(j)));
    const std::size_t kr = sd.k_basis.size();
    sf.k_images = Matrix<T>(n, kr);
    for (std::size_t i = 0; i < kr; ++i) {
        const std::vector<T> k = convert<T>(sd.k_basis[i]);
        sf.k_images.set_column(i, sf.sharp * k);
        sf.mu_pairings.push_back(sf.pairing(k, sf.mu));
    }
    sf.k_majorant = sf.k_images.transpose() * sf.k_images;
    return sf;
}

SplitFrame<double> split_frame(const SplitData& sd, const GrassPoint& z) {
    const BaseFrame<double> base = make_base_frame<double>(sd.lattice, &sd);
    return make_split_frame(sd, base, isometry_to_base(sd.lattice, base, z));
}

Matrix<Rational> eichler_matrix(const GramLattice& lattice, const LatticeVector& v, const LatticeVector& lam) {
    if (lattice.norm(v) != 0) throw Error(ErrorKind::NotIsotropic, "Eichler vector is not isotropic");
    if (lattice.pairing(v, lam) != 0) throw Error(ErrorKind::NotOrthogonalToU, "lambda is not orthogonal to u");
    const std::size_t n = lattice.rank();
    const Rational ql = lattice.quadratic(lam);
    Matrix<Rational> m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        LatticeVector x(n, Rational(0));
        x[i] = 1;
        const Rational xv = lattice.pairing(x, v), xl = lattice.pairing(x, lam);
        for (std::size_t r = 0; r < n; ++r) x[r] += -xv * lam[r] + xl * v[r] - ql * xv * v[r];
        m.set_column(i, x);
    }
    return m;
}

Isometry<Rational> eichler(const SplitData& sd, const LatticeVector& lam_K) {
    return Isometry<Rational>{eichler_matrix(sd.lattice, sd.u, sd.from_K_coords(lam_K))};
}

Isometry<Rational> eichler_word(const SplitData& sd, const std::vector<EichlerStep>& steps) {
    Matrix<Rational> m = Matrix<Rational>::identity(sd.lattice.rank());
    const LatticeVector u2 = sd.u_double_prime();
    for (const auto& step : steps) {
        const LatticeVector lam = sd.complement_vector(step.lam_K);
        m = m * eichler_matrix(sd.lattice, step.along_u_double_prime ? u2 : sd.u, lam);
    }
    return Isometry<Rational>{m};
}

template <class T>
Isometry<T> convert_isometry(const Isometry<Rational>& g) {
    return Isometry<T>{convert<T>(g.matrix)};
}

double EichlerReport::max() const {
    return std::max({fixes_u, maps_w, sharp_equal, norm_preserved, phase_law});
}

template <class T>
EichlerReport eichler_report(const SplitData& sd, const BaseFrame<T>& base, const Isometry<T>& g,
                             const LatticeVector& lam_K) {
    EichlerReport rep;
    const Isometry<Rational> e_r = eichler(sd, lam_K);
    const Matrix<T> e = convert<T>(e_r.matrix);
    const SplitFrame<T> f1 = make_split_frame(sd, base, g);
    const SplitFrame<T> f2 = make_split_frame(sd, base, Isometry<T>{g.matrix * e});
    const std::size_t n = sd.lattice.rank();
    rep.fixes_u = max_abs_diff(std::vector<T>(e * f1.u), f1.u);

    auto components = [](const SplitFrame<T>& f, const std::vector<T>& v) {
        // (v_{w perp}, v_w)
        std::vector<T> vz(v.size(), FieldTraits<T>::zero());
        for (int j = f.p; j < f.p + f.q; ++j)
            vz = axpy(vz, T(-f.pairing(v, f.frame.vectors.column(j))), f.frame.vectors.column(j));
        std::vector<T> vzp = v;
        for (std::size_t i = 0; i < v.size(); ++i) vzp[i] -= vz[i];
        return std::make_pair(axpy(vzp, T(-f.pairing(v, f.u_perp) / f.u_perp_norm), f.u_perp),
                              axpy(vz, T(-f.pairing(v, f.u_z) / f.u_z_norm), f.u_z));
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<T> v(n, FieldTraits<T>::zero());
        v[i] = FieldTraits<T>::one();
        const auto [wp2, w2] = components(f2, v);
        const auto [wp1, w1] = components(f1, std::vector<T>(e * v));
        rep.maps_w = std::max({rep.maps_w, max_abs_diff(std::vector<T>(e * wp2), wp1),
                               max_abs_diff(std::vector<T>(e * w2), w1)});
    }
    for (std::size_t i = 0; i < f1.k_images.rows(); ++i)
        for (std::size_t j = 0; j < f1.k_images.cols(); ++j)
            rep.sharp_equal = std::max(rep.sharp_equal, std::abs(to_d(f1.k_images(i, j)) - to_d(f2.k_images(i, j))));
    const std::vector<T> lam = convert<T>(sd.from_K_coords(lam_K));
    for (std::size_t i = 0; i < sd.k_basis.size(); ++i) {
        const std::vector<T> k = convert<T>(sd.k_basis[i]);
        rep.norm_preserved = std::max(rep.norm_preserved, std::abs(to_d(f1.w_perp_norm(k)) - to_d(f2.w_perp_norm(k))));
        const T d = f2.mu_pairings[i] - f1.mu_pairings[i] - f1.pairing(k, lam);
        rep.phase_law = std::max(rep.phase_law, std::abs(to_d(d)));
    }
    return rep;
}

template BaseFrame<double> make_base_frame<double>(const GramLattice&, const SplitData*);
template BaseFrame<QSqrt2> make_base_frame<QSqrt2>(const GramLattice&, const SplitData*);
template double isometry_defect<double>(const GramLattice&, const Isometry<double>&);
template QSqrt2 isometry_defect<QSqrt2>(const GramLattice&, const Isometry<QSqrt2>&);
template Rational isometry_defect<Rational>(const GramLattice&, const Isometry<Rational>&);
template struct Frame<double>;
template struct Frame<QSqrt2>;
template Frame<double> make_frame<double>(const GramLattice&, const BaseFrame<double>&, const Isometry<double>&);
template Frame<QSqrt2> make_frame<QSqrt2>(const GramLattice&, const BaseFrame<QSqrt2>&, const Isometry<QSqrt2>&);
template struct SplitFrame<double>;
template struct SplitFrame<QSqrt2>;
Isometry<Rational> random_eichler_isometry(const SplitData& sd, std::mt19937_64& rng, int steps) {
    std::uniform_int_distribution<int> num(-3, 3), den(1, 3);
    std::vector<EichlerStep> word;
    for (int s = 0; s < steps; ++s) {
        EichlerStep st;
        st.along_u_double_prime = (s % 2 == 1);
        for (std::size_t i = 0; i < sd.k_basis.size(); ++i) {
            Rational x(num(rng), den(rng));
            x.canonicalize();
            st.lam_K.push_back(x);
        }
        word.push_back(st);
    }
    return eichler_word(sd, word);
}

template SplitFrame<double> make_split_frame<double>(const SplitData&, const BaseFrame<double>&, const Isometry<double>&);
template SplitFrame<QSqrt2> make_split_frame<QSqrt2>(const SplitData&, const BaseFrame<QSqrt2>&, const Isometry<QSqrt2>&);
template Isometry<double> convert_isometry<double>(const Isometry<Rational>&);
template Isometry<QSqrt2> convert_isometry<QSqrt2>(const Isometry<Rational>&);
template EichlerReport eichler_report<double>(const SplitData&, const BaseFrame<double>&, const Isometry<double>&,
                                              const LatticeVector&);
template EichlerReport eichler_report<QSqrt2>(const SplitData&, const BaseFrame<QSqrt2>&, const Isometry<QSqrt2>&,
                                              const LatticeVector&);

}  // namespace kmlift
