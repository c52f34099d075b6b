#pragma once

#include <map>
#include <utility>

#include "kmlift/grassmannian.hpp"
#include "kmlift/polynomial.hpp"

namespace kmlift {

/// Coefficient ring matching a frame scalar type.
template <class T>
struct RingFor;
template <>
struct RingFor<QSqrt2> {
    using type = HalfPower;
};
template <>
struct RingFor<double> {
    using type = double;
};

enum class DecomposeMethod { ClosedForm, Oracle };

/// Polynomials p_{h+,h-} on g sharp(V), written in K-coordinates s, with
/// P(g v) = sum (v, u_{z perp})^{h+} (v, u_z)^{h-} p_{h+,h-}(g sharp v).
/// Zero components are omitted.
template <class T>
using Decomposition = std::map<std::pair<int, int>, Polynomial<typename RingFor<T>::type>>;

template <class T>
Decomposition<T> u_decompose(const Polynomial<typename RingFor<T>::type>& poly, const SplitFrame<T>& frame,
                             DecomposeMethod method);

/// The linear map (a, b, s) -> x(g v) for v = a u_{z perp}/u_{z perp}^2 + b u_z/u_z^2 + sum_i s_i (k_i)_{w perp + w}.
template <class T>
Matrix<typename RingFor<T>::type> decomposition_coordinates(const SplitFrame<T>& frame);

}  // namespace kmlift
