#include "kmlift/lattice.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numeric>

namespace kmlift {

namespace {

Int floor_div(Int a, Int b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Int mod_positive(Int a, Int m) {
    Int r = a % m;
    return r < 0 ? r + m : r;
}

Int to_int(const Rational& r) {
    if (!is_integer(r)) throw Error(ErrorKind::DimensionMismatch, "expected an integer, got " + r.get_str());
    if (!r.get_num().fits_slong_p()) throw Error(ErrorKind::DimensionMismatch, "integer overflow");
    return r.get_num().get_si();
}

/// Unimodular V with row * V = (g, 0, ..., 0), g = gcd(row) > 0.
Matrix<Rational> column_reduce_row(std::vector<Int> row) {
    const std::size_t n = row.size();
    IntMatrix v(n, std::vector<Int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1;
    auto col_sub = [&](std::size_t j, std::size_t i, Int f) {
        for (std::size_t r = 0; r < n; ++r) v[r][j] -= f * v[r][i];
        row[j] -= f * row[i];
    };
    while (true) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i)
            if (row[i] != 0 && (best == n || std::llabs(row[i]) < std::llabs(row[best]))) best = i;
        if (best == n) throw Error(ErrorKind::Degenerate, "zero row");
        bool done = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == best || row[j] == 0) continue;
            col_sub(j, best, floor_div(row[j], row[best]));
            if (row[j] != 0) done = false;
        }
        if (done) {
            if (best != 0) {
                for (std::size_t r = 0; r < n; ++r) std::swap(v[r][0], v[r][best]);
                std::swap(row[0], row[best]);
            }
            if (row[0] < 0) {
                for (std::size_t r = 0; r < n; ++r) v[r][0] = -v[r][0];
                row[0] = -row[0];
            }
            break;
        }
    }
    Matrix<Rational> out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = Rational(static_cast<long>(v[i][j]));
    return out;
}

}  // namespace

Int gcd_vector(const std::vector<Int>& v) {
    Int g = 0;
    for (Int x : v) g = std::gcd(g, std::llabs(x));
    return g;
}

LatticeVector to_rational(const std::vector<Int>& v) {
    LatticeVector out;
    out.reserve(v.size());
    for (Int x : v) out.emplace_back(static_cast<long>(x));
    return out;
}

Matrix<double> to_double(const Matrix<Rational>& m) {
    return m.map<double>([](const Rational& r) { return r.get_d(); });
}
Matrix<double> to_double(const Matrix<QSqrt2>& m) {
    return m.map<double>([](const QSqrt2& r) { return r.to_double(); });
}
std::vector<double> to_double(const RationalVector& v) {
    return map_vector<double>(v, [](const Rational& r) { return r.get_d(); });
}
std::vector<double> to_double(const std::vector<QSqrt2>& v) {
    return map_vector<double>(v, [](const QSqrt2& r) { return r.to_double(); });
}

Signature sylvester_signature(const Matrix<Rational>& symmetric) {
    Matrix<Rational> a = symmetric;
    const std::size_t n = a.rows();
    Signature sig;
    auto swap_sym = [&](std::size_t i, std::size_t j) {
        for (std::size_t k = 0; k < n; ++k) std::swap(a(i, k), a(j, k));
        for (std::size_t k = 0; k < n; ++k) std::swap(a(k, i), a(k, j));
    };
    for (std::size_t k = 0; k < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t j = k + 1;
            while (j < n && a(j, j) == 0) ++j;
            if (j < n) {
                swap_sym(k, j);
            } else {
                j = k + 1;
                while (j < n && a(k, j) == 0) ++j;
                if (j == n) continue;  // zero row: degenerate direction
                for (std::size_t c = 0; c < n; ++c) a(k, c) += a(j, c);
                for (std::size_t r = 0; r < n; ++r) a(r, k) += a(r, j);
            }
        }
        const Rational pivot = a(k, k);
        if (pivot > 0) ++sig.p; else ++sig.q;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            const Rational f = a(i, k) / pivot;
            for (std::size_t c = k; c < n; ++c) a(i, c) -= f * a(k, c);
            for (std::size_t r = k; r < n; ++r) a(r, i) -= f * a(r, k);
        }
    }
    return sig;
}

Matrix<Rational> GramLattice::gram_rational() const {
    const std::size_t n = gram_.size();
    Matrix<Rational> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Rational(static_cast<long>(gram_[i][j]));
    return m;
}

Matrix<double> GramLattice::gram_double() const {
    const std::size_t n = gram_.size();
    Matrix<double> m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = static_cast<double>(gram_[i][j]);
    return m;
}

LatticeVector GramLattice::dual_coords(const LatticeVector& v) const {
    const std::size_t n = gram_.size();
    if (v.size() != n) throw Error(ErrorKind::DimensionMismatch, "vector length");
    LatticeVector out(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (gram_[i][j] != 0) out[i] += Rational(static_cast<long>(gram_[i][j])) * v[j];
    return out;
}

Rational GramLattice::pairing(const LatticeVector& a, const LatticeVector& b) const {
    const LatticeVector gb = dual_coords(b);
    if (a.size() != gb.size()) throw Error(ErrorKind::DimensionMismatch, "vector length");
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * gb[i];
    return s;
}

Rational GramLattice::quadratic(const LatticeVector& v) const { return norm(v) / 2; }

GramLattice build_lattice(const IntMatrix& gram) {
    const std::size_t n = gram.size();
    if (n == 0) throw Error(ErrorKind::Degenerate, "empty Gram matrix");
    for (const auto& row : gram)
        if (row.size() != n) throw Error(ErrorKind::NotSymmetric, "Gram matrix is not square");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (gram[i][j] != gram[j][i]) throw Error(ErrorKind::NotSymmetric, "Gram matrix is not symmetric");
    for (std::size_t i = 0; i < n; ++i)
        if (gram[i][i] % 2 != 0) throw Error(ErrorKind::NotEven, "odd diagonal entry");
    GramLattice l;
    l.gram_ = gram;
    const Rational det = determinant(l.gram_rational());
    if (det == 0) throw Error(ErrorKind::Degenerate, "zero determinant");
    l.det_ = to_int(det);
    l.signature_ = sylvester_signature(l.gram_rational());
    return l;
}

GramLattice build_lattice_unchecked_rank0() { return GramLattice(); }

SmithForm smith_normal_form(const IntMatrix& input) {
    const std::size_t n = input.size();
    const std::size_t m = n ? input[0].size() : 0;
    IntMatrix a = input;
    IntMatrix u(n, std::vector<Int>(n, 0)), v(m, std::vector<Int>(m, 0)), vinv(m, std::vector<Int>(m, 0));
    for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
    for (std::size_t i = 0; i < m; ++i) v[i][i] = vinv[i][i] = 1;

    auto row_sub = [&](std::size_t i, std::size_t t, Int f) {  // row_i -= f row_t
        for (std::size_t c = 0; c < m; ++c) a[i][c] -= f * a[t][c];
        for (std::size_t c = 0; c < n; ++c) u[i][c] -= f * u[t][c];
    };
    auto col_sub = [&](std::size_t j, std::size_t t, Int f) {  // col_j -= f col_t
        for (std::size_t r = 0; r < n; ++r) a[r][j] -= f * a[r][t];
        for (std::size_t r = 0; r < m; ++r) v[r][j] -= f * v[r][t];
        for (std::size_t c = 0; c < m; ++c) vinv[t][c] += f * vinv[j][c];
    };
    auto row_swap = [&](std::size_t i, std::size_t j) {
        std::swap(a[i], a[j]);
        std::swap(u[i], u[j]);
    };
    auto col_swap = [&](std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < n; ++r) std::swap(a[r][i], a[r][j]);
        for (std::size_t r = 0; r < m; ++r) std::swap(v[r][i], v[r][j]);
        std::swap(vinv[i], vinv[j]);
    };

    const std::size_t k = std::min(n, m);
    for (std::size_t t = 0; t < k; ++t) {
        while (true) {
            std::size_t bi = n, bj = m;
            for (std::size_t i = t; i < n; ++i)
                for (std::size_t j = t; j < m; ++j)
                    if (a[i][j] != 0 && (bi == n || std::llabs(a[i][j]) < std::llabs(a[bi][bj]))) {
                        bi = i;
                        bj = j;
                    }
            if (bi == n) break;
            if (bi != t) row_swap(bi, t);
            if (bj != t) col_swap(bj, t);
            bool clean = true;
            for (std::size_t i = t + 1; i < n; ++i) {
                if (a[i][t] == 0) continue;
                row_sub(i, t, floor_div(a[i][t], a[t][t]));
                if (a[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < m; ++j) {
                if (a[t][j] == 0) continue;
                col_sub(j, t, floor_div(a[t][j], a[t][t]));
                if (a[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            // divisibility of the remaining block
            std::size_t bad = n;
            for (std::size_t i = t + 1; i < n && bad == n; ++i)
                for (std::size_t j = t + 1; j < m; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (bad == n) break;
            for (std::size_t c = 0; c < m; ++c) a[t][c] += a[bad][c];
            for (std::size_t c = 0; c < n; ++c) u[t][c] += u[bad][c];
        }
        if (a[t][t] < 0) {
            for (std::size_t c = 0; c < m; ++c) a[t][c] = -a[t][c];
            for (std::size_t c = 0; c < n; ++c) u[t][c] = -u[t][c];
        }
    }
    SmithForm out;
    out.u = u;
    out.v = v;
    out.v_inverse = vinv;
    for (std::size_t t = 0; t < k; ++t) out.diagonal.push_back(a[t][t]);
    return out;
}

DiscriminantGroup::DiscriminantGroup(const GramLattice& lattice) : lattice_(lattice) {
    const std::size_t n = lattice.rank();
    if (n == 0) {
        reps_.push_back({});
        q_cache_.push_back(Rational(0));
        return;
    }
    const SmithForm snf = smith_normal_form(lattice.gram());
    // key(x) = (U G x) mod d_i; generators V e_i / d_i
    for (std::size_t i = 0; i < n; ++i) {
        const Int d = snf.diagonal[i];
        if (d == 1) continue;
        divisors_.push_back(d);
        LatticeVector g(n);
        for (std::size_t r = 0; r < n; ++r) {
            g[r] = Rational(mpz_class(static_cast<long>(snf.v[r][i])), mpz_class(static_cast<long>(d)));
            g[r].canonicalize();
        }
        generators_.push_back(g);
        std::vector<Int> row(n, 0);
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t k = 0; k < n; ++k) row[c] += snf.u[i][k] * lattice.gram()[k][c];
        key_rows_.push_back(row);
    }
    order_ = 1;
    for (Int d : divisors_) order_ *= static_cast<std::size_t>(d);
    reps_.reserve(order_);
    q_cache_.reserve(order_);
    for (std::size_t idx = 0; idx < order_; ++idx) {
        const std::vector<Int> k = key(idx);
        LatticeVector rep(n, Rational(0));
        for (std::size_t i = 0; i < k.size(); ++i)
            for (std::size_t r = 0; r < n; ++r) rep[r] += Rational(static_cast<long>(k[i])) * generators_[i][r];
        reps_.push_back(rep);
        q_cache_.push_back(frac(lattice.quadratic(rep)));
    }
}

std::vector<Int> DiscriminantGroup::key(std::size_t index) const {
    std::vector<Int> k(divisors_.size());
    for (std::size_t i = 0; i < divisors_.size(); ++i) {
        k[i] = static_cast<Int>(index % static_cast<std::size_t>(divisors_[i]));
        index /= static_cast<std::size_t>(divisors_[i]);
    }
    return k;
}

std::size_t DiscriminantGroup::index_of_key(const std::vector<Int>& key) const {
    if (key.size() != divisors_.size()) throw Error(ErrorKind::IndexMismatch, "coset key length");
    std::size_t idx = 0, radix = 1;
    for (std::size_t i = 0; i < divisors_.size(); ++i) {
        idx += static_cast<std::size_t>(mod_positive(key[i], divisors_[i])) * radix;
        radix *= static_cast<std::size_t>(divisors_[i]);
    }
    return idx;
}

bool DiscriminantGroup::contains_dual(const LatticeVector& v) const {
    for (const auto& x : lattice_.dual_coords(v))
        if (!is_integer(x)) return false;
    return true;
}

std::size_t DiscriminantGroup::index_of(const LatticeVector& x) const {
    if (x.size() != static_cast<std::size_t>(lattice_.rank())) throw Error(ErrorKind::DimensionMismatch, "vector length");
    if (!contains_dual(x)) throw Error(ErrorKind::IndexMismatch, "vector is not in the dual lattice");
    std::vector<Int> k(divisors_.size());
    for (std::size_t i = 0; i < divisors_.size(); ++i) {
        Rational s(0);
        for (std::size_t c = 0; c < x.size(); ++c) s += Rational(static_cast<long>(key_rows_[i][c])) * x[c];
        k[i] = mod_positive(to_int(s), divisors_[i]);
    }
    return index_of_key(k);
}

LatticeVector DiscriminantGroup::representative(std::size_t index) const { return reps_.at(index); }

Rational DiscriminantGroup::q_mod1(std::size_t index) const { return q_cache_.at(index); }

Rational DiscriminantGroup::b_mod1(std::size_t i, std::size_t j) const {
    return frac(lattice_.pairing(reps_.at(i), reps_.at(j)));
}

std::size_t DiscriminantGroup::add(std::size_t i, std::size_t j) const {
    std::vector<Int> a = key(i), b = key(j);
    for (std::size_t t = 0; t < a.size(); ++t) a[t] += b[t];
    return index_of_key(a);
}

std::size_t DiscriminantGroup::negate(std::size_t i) const {
    std::vector<Int> a = key(i);
    for (auto& x : a) x = -x;
    return index_of_key(a);
}

LatticeVector SplitData::u_double_prime() const {
    const Rational qu = lattice.quadratic(u_prime);
    LatticeVector out = u_prime;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= qu * u[i];
    return out;
}

LatticeVector SplitData::to_K_coords(const LatticeVector& v) const {
    if (lattice.pairing(v, u) != 0) throw Error(ErrorKind::NotOrthogonalToU, "vector is not orthogonal to u");
    const LatticeVector c = left_inverse * v;
    // verify v = c0 u + sum c_i k_i
    LatticeVector back(v.size(), Rational(0));
    for (std::size_t r = 0; r < v.size(); ++r) {
        back[r] += c[0] * u[r];
        for (std::size_t i = 0; i < k_basis.size(); ++i) back[r] += c[i + 1] * k_basis[i][r];
    }
    if (back != v) throw Error(ErrorKind::IndexMismatch, "vector not in span of u and K");
    return LatticeVector(c.begin() + 1, c.end());
}

LatticeVector SplitData::from_K_coords(const LatticeVector& s) const {
    if (s.size() != k_basis.size()) throw Error(ErrorKind::DimensionMismatch, "K coordinate length");
    LatticeVector out(u.size(), Rational(0));
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t r = 0; r < out.size(); ++r) out[r] += s[i] * k_basis[i][r];
    return out;
}

LatticeVector SplitData::complement_vector(const LatticeVector& s) const {
    LatticeVector x = from_K_coords(s);
    const Rational c = lattice.pairing(x, u_double_prime());
    for (std::size_t r = 0; r < x.size(); ++r) x[r] -= c * u[r];
    return x;
}

LatticeVector SplitData::project(const LatticeVector& v) const {
    const Rational vu = lattice.pairing(v, u);
    const Rational m = vu / static_cast<long>(N);
    if (!is_integer(m)) throw Error(ErrorKind::IndexMismatch, "vector is not in L0'");
    const Rational vup = lattice.pairing(v, u_prime);
    LatticeVector x = v;
    for (std::size_t r = 0; r < x.size(); ++r) x[r] -= vup * u[r] + m * zeta[r];
    return to_K_coords(x);
}

SplitData split_data(const GramLattice& lattice, const LatticeVector& u, const std::optional<LatticeVector>& u_prime_in) {
    const std::size_t n = lattice.rank();
    if (u.size() != n) throw Error(ErrorKind::DimensionMismatch, "u length");
    std::vector<Int> ui(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_integer(u[i])) throw Error(ErrorKind::NotPrimitive, "u is not a lattice vector");
        ui[i] = to_int(u[i]);
    }
    if (gcd_vector(ui) != 1) throw Error(ErrorKind::NotPrimitive, "u is not primitive");
    if (lattice.norm(u) != 0) throw Error(ErrorKind::NotIsotropic, "q(u) != 0");
    if (n < 2) throw Error(ErrorKind::NotIsotropic, "rank too small");

    SplitData sd;
    sd.lattice = lattice;
    sd.u = u;

    std::vector<Int> gu(n);
    const LatticeVector gu_r = lattice.dual_coords(u);
    for (std::size_t i = 0; i < n; ++i) gu[i] = to_int(gu_r[i]);
    sd.N = gcd_vector(gu);

    const Matrix<Rational> V = column_reduce_row(gu);
    sd.zeta = V.column(0);

    // kernel of (., u): columns 1..n-1 of V
    Matrix<Rational> kernel(n, n - 1);
    for (std::size_t j = 1; j < n; ++j) kernel.set_column(j - 1, V.column(j));
    const LatticeVector full = inverse(V) * u;  // u in the V basis
    std::vector<Int> c(n - 1);
    for (std::size_t j = 1; j < n; ++j) c[j - 1] = to_int(full[j]);

    // unimodular W with first column c
    Matrix<Rational> W;
    {
        const Matrix<Rational> X = column_reduce_row(c);  // c^T X = (1,0,..)
        // c^T X = e_1^T  =>  X^T c = e_1  =>  W = (X^T)^{-1} has first column c
        W = inverse(X.transpose());
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        LatticeVector k = kernel * W.column(i);
        sd.k_basis.push_back(k);
    }
    const std::size_t kr = sd.k_basis.size();
    if (kr == 0) {
        sd.K = build_lattice_unchecked_rank0();
    } else {
        IntMatrix kg(kr, std::vector<Int>(kr));
        for (std::size_t i = 0; i < kr; ++i)
            for (std::size_t j = 0; j < kr; ++j) kg[i][j] = to_int(lattice.pairing(sd.k_basis[i], sd.k_basis[j]));
        sd.K = build_lattice(kg);
    }

    // u'
    if (u_prime_in) {
        if (u_prime_in->size() != n) throw Error(ErrorKind::DimensionMismatch, "u' length");
        sd.u_prime = *u_prime_in;
        if (lattice.pairing(u, sd.u_prime) != 1) throw Error(ErrorKind::BadPairing, "(u,u') != 1");
        for (const auto& x : lattice.dual_coords(sd.u_prime))
            if (!is_integer(x)) throw Error(ErrorKind::BadPairing, "u' is not in the dual lattice");
    } else {
        const Matrix<Rational> X = column_reduce_row(ui);  // u^T X = e_1
        const LatticeVector cvec = X.column(0);            // u^T cvec = 1
        Matrix<Rational> rhs(n, 1);
        rhs.set_column(0, cvec);
        sd.u_prime = solve(lattice.gram_rational(), rhs).column(0);
    }

    Matrix<Rational> M(n, kr + 1);
    M.set_column(0, u);
    for (std::size_t i = 0; i < kr; ++i) M.set_column(i + 1, sd.k_basis[i]);
    const Matrix<Rational> Mt = M.transpose();
    sd.left_inverse = inverse(Mt * M) * Mt;

    const DiscriminantGroup dl(lattice);
    const DiscriminantGroup dk(sd.K);
    for (std::size_t idx = 0; idx < dl.order(); ++idx) {
        const LatticeVector rep = dl.representative(idx);
        const Rational m = lattice.pairing(rep, u) / static_cast<long>(sd.N);
        if (!is_integer(m)) continue;
        sd.L0_cosets.push_back(idx);
        sd.projection[idx] = dk.index_of(sd.project(rep));
    }

    // postconditions: p(L) in K, surjectivity, order identity
    for (std::size_t i = 0; i < n; ++i) {
        LatticeVector e(n, Rational(0));
        e[i] = 1;
        for (const auto& x : sd.project(e))
            if (!is_integer(x)) throw Error(ErrorKind::IndexMismatch, "projection does not map L into K");
    }
    std::vector<bool> hit(dk.order(), false);
    for (const auto& [from, to] : sd.projection) hit[to] = true;
    if (std::find(hit.begin(), hit.end(), false) != hit.end())
        throw Error(ErrorKind::IndexMismatch, "projection L0'/L -> K'/K is not surjective");
    if (dl.order() != static_cast<std::size_t>(sd.N * sd.N) * dk.order())
        throw Error(ErrorKind::IndexMismatch, "|L'/L| != N^2 |K'/K|");
    return sd;
}

Matrix<double> cholesky(const Matrix<double>& a) {
    const std::size_t n = a.rows();
    Matrix<double> l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = a(j, j);
        for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
        if (!(s > 0)) throw Error(ErrorKind::NotPositiveDefinite, "majorant is not positive definite");
        l(j, j) = std::sqrt(s);
        for (std::size_t i = j + 1; i < n; ++i) {
            double t = a(i, j);
            for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
            l(i, j) = t / l(j, j);
        }
    }
    return l;
}

namespace {

double form_value(const Matrix<double>& q, const std::vector<double>& y) {
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) s += y[i] * q(i, j) * y[j];
    return s;
}

double boundary_slack(double bound) { return 1e-9 * std::max(1.0, bound); }

}  // namespace

std::vector<std::vector<Int>> short_vectors(const Matrix<double>& majorant, const std::vector<double>& shift,
                                            double bound) {
    const std::size_t n = majorant.rows();
    if (shift.size() != n) throw Error(ErrorKind::DimensionMismatch, "shift length");
    std::vector<std::vector<Int>> out;
    if (n == 0) {
        if (bound >= 0) out.push_back({});
        return out;
    }
    cholesky(majorant);  // definiteness check
    // Q(y) = sum_i d_i (y_i + sum_{j>i} m_ij y_j)^2
    Matrix<double> q = majorant;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            q(j, i) = q(i, j);
            q(i, j) = q(i, j) / q(i, i);
        }
        for (std::size_t k = i + 1; k < n; ++k)
            for (std::size_t l = k; l < n; ++l) q(k, l) -= q(k, i) * q(i, l);
    }
    const double limit = bound + boundary_slack(bound);
    std::vector<Int> x(n, 0);
    std::vector<double> y(n, 0.0);
    std::function<void(std::size_t, double)> recurse = [&](std::size_t level, double used) {
        const std::size_t i = level;
        double center = 0;
        for (std::size_t j = i + 1; j < n; ++j) center -= q(i, j) * y[j];
        const double room = limit - used;
        if (room < 0) return;
        const double half = std::sqrt(room / q(i, i));
        const Int lo = static_cast<Int>(std::ceil(center - half - shift[i] - 1e-12));
        const Int hi = static_cast<Int>(std::floor(center + half - shift[i] + 1e-12));
        for (Int xi = lo; xi <= hi; ++xi) {
            x[i] = xi;
            y[i] = static_cast<double>(xi) + shift[i];
            const double t = y[i] - center;
            const double next = used + q(i, i) * t * t;
            if (next > limit) continue;
            if (i == 0) {
                out.push_back(x);
            } else {
                recurse(i - 1, next);
            }
        }
    };
    recurse(n - 1, 0.0);
    // exact filter and ordering
    std::vector<std::vector<Int>> kept;
    for (auto& v : out) {
        std::vector<double> yy(n);
        for (std::size_t i = 0; i < n; ++i) yy[i] = static_cast<double>(v[i]) + shift[i];
        if (form_value(majorant, yy) <= limit) kept.push_back(std::move(v));
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<std::vector<Int>> short_vectors_box(const Matrix<double>& majorant, const std::vector<double>& shift,
                                                double bound) {
    const std::size_t n = majorant.rows();
    std::vector<std::vector<Int>> out;
    if (n == 0) {
        if (bound >= 0) out.push_back({});
        return out;
    }
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = majorant(i, j);
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
    if (!(lmin > 0)) throw Error(ErrorKind::NotPositiveDefinite, "majorant is not positive definite");
    const double limit = bound + boundary_slack(bound);
    const double b = std::sqrt(limit / lmin);
    std::vector<Int> lo(n), hi(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = static_cast<Int>(std::floor(-shift[i] - b)) - 1;
        hi[i] = static_cast<Int>(std::ceil(-shift[i] + b)) + 1;
        x[i] = lo[i];
    }
    while (true) {
        std::vector<double> yy(n);
        for (std::size_t i = 0; i < n; ++i) yy[i] = static_cast<double>(x[i]) + shift[i];
        if (form_value(majorant, yy) <= limit) out.push_back(x);
        std::size_t k = n;
        while (k > 0) {
            --k;
            if (++x[k] <= hi[k]) break;
            x[k] = lo[k];
            if (k == 0) {
                std::sort(out.begin(), out.end());
                return out;
            }
        }
    }
}

std::vector<LatticeVector> enumerate_coset(const GramLattice& lattice, const LatticeVector& coset,
                                           const Matrix<double>& majorant, double radius) {
    if (!(radius > 0)) throw Error(ErrorKind::NonconvergentRequest, "radius must be positive");
    if (coset.size() != static_cast<std::size_t>(lattice.rank()) || majorant.rows() != coset.size())
        throw Error(ErrorKind::DimensionMismatch, "coset/majorant size");
    const auto xs = short_vectors(majorant, to_double(coset), radius * radius);
    std::vector<LatticeVector> out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        LatticeVector v = coset;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += Rational(static_cast<long>(x[i]));
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace kmlift
