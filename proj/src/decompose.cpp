#include "kmlift/decompose.hpp"

namespace kmlift {

namespace {

template <class T>
typename RingFor<T>::type to_ring(const T& v) {
    return RingTraits<typename RingFor<T>::type>::from_field(v);
}

template <class R>
void drop_zero(std::map<std::pair<int, int>, Polynomial<R>>& m) {
    for (auto it = m.begin(); it != m.end();) it = it->second.is_zero() ? m.erase(it) : std::next(it);
}

}  // namespace

template <class T>
Matrix<typename RingFor<T>::type> decomposition_coordinates(const SplitFrame<T>& frame) {
    using R = typename RingFor<T>::type;
    const std::size_t n = frame.u.size();
    const std::size_t nk = frame.k_images.cols();
    Matrix<R> map(n, nk + 2);
    for (std::size_t j = 0; j < n; ++j) {
        const std::vector<T> f = frame.frame.vectors.column(j);
        const T sign = FieldTraits<T>::from_rational(Rational(frame.frame.sign(static_cast<int>(j))));
        map(j, 0) = to_ring<T>(T(sign * frame.pairing(frame.u_perp, f) / frame.u_perp_norm));
        map(j, 1) = to_ring<T>(T(sign * frame.pairing(frame.u_z, f) / frame.u_z_norm));
        for (std::size_t i = 0; i < nk; ++i) map(j, i + 2) = to_ring<T>(frame.k_images(j, i));
    }
    return map;
}

template <class T>
Decomposition<T> u_decompose(const Polynomial<typename RingFor<T>::type>& poly, const SplitFrame<T>& frame,
                             DecomposeMethod method) {
    using R = typename RingFor<T>::type;
    const int n = static_cast<int>(frame.u.size());
    const int p = frame.p;
    const int nk = static_cast<int>(frame.k_images.cols());
    if (poly.nvars() != n) throw Error(ErrorKind::DimensionMismatch, "polynomial must live on R^{p,q}");
    Decomposition<T> out;

    if (method == DecomposeMethod::Oracle) {
        const Polynomial<R> composed = poly.compose_linear(decomposition_coordinates(frame));
        for (const auto& [m, c] : composed.terms()) {
            Monomial rest(m.begin() + 2, m.end());
            auto key = std::make_pair(m[0], m[1]);
            auto it = out.find(key);
            if (it == out.end()) it = out.emplace(key, Polynomial<R>(nk)).first;
            it->second.add_term(rest, c);
        }
        drop_zero(out);
        return out;
    }

    const auto deg = poly.bidegree(p);
    if (deg.second != 0) throw Error(ErrorKind::DegreeMismatch, "closed form needs degree (m, 0)");
    const R inv_u2 = to_ring<T>(T(FieldTraits<T>::one() / frame.u_perp_norm));
    std::vector<Polynomial<R>> forms;
    std::vector<R> gu;
    for (int j = 0; j < p; ++j) {
        Polynomial<R> f(nk);
        for (int i = 0; i < nk; ++i) {
            Monomial e(nk, 0);
            e[i] = 1;
            f.add_term(e, to_ring<T>(frame.k_images(j, i)));
        }
        forms.push_back(std::move(f));
        gu.push_back(to_ring<T>(frame.gu_pairings[j]));
    }
    for (const auto& [mono, c] : poly.terms()) {
        // iterate 0 <= k_j <= mono_j
        std::vector<int> k(p, 0);
        while (true) {
            int h = 0;
            R coef = c;
            Polynomial<R> t = Polynomial<R>::constant(nk, RingTraits<R>::one());
            for (int j = 0; j < p; ++j) {
                h += k[j];
                mpz_class b;
                mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(mono[j]), static_cast<unsigned long>(k[j]));
                coef = coef * RingTraits<R>::from_rational(Rational(b));
                for (int e = 0; e < k[j]; ++e) coef = coef * gu[j];
                if (mono[j] - k[j] > 0) t *= forms[j].power(mono[j] - k[j]);
            }
            for (int e = 0; e < h; ++e) coef = coef * inv_u2;
            auto key = std::make_pair(h, 0);
            auto it = out.find(key);
            if (it == out.end()) it = out.emplace(key, Polynomial<R>(nk)).first;
            it->second += t.scaled(coef);
            int j = 0;
            while (j < p && k[j] == mono[j]) k[j++] = 0;
            if (j == p) break;
            ++k[j];
        }
    }
    drop_zero(out);
    return out;
}

template Matrix<HalfPower> decomposition_coordinates<QSqrt2>(const SplitFrame<QSqrt2>&);
template Matrix<double> decomposition_coordinates<double>(const SplitFrame<double>&);
template Decomposition<QSqrt2> u_decompose<QSqrt2>(const Polynomial<HalfPower>&, const SplitFrame<QSqrt2>&,
                                                   DecomposeMethod);
template Decomposition<double> u_decompose<double>(const Polynomial<double>&, const SplitFrame<double>&,
                                                   DecomposeMethod);

}  // namespace kmlift
