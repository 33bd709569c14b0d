#include "cfbkit/shifts.hpp"

#include <algorithm>
#include <cmath>

namespace cfbkit {

namespace {

enum class Monotone { Increasing, Decreasing, Neither };

Monotone monotonicity(const std::vector<double>& v) {
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1]) inc = false;
        if (v[i] > v[i - 1]) dec = false;
    }
    if (inc) return Monotone::Increasing;
    if (dec) return Monotone::Decreasing;
    return Monotone::Neither;
}

long double window_log_product(const std::vector<double>& w, std::size_t k, std::size_t n, bool reciprocal) {
    long double s = 0.0L;
    for (std::size_t j = k; j < k + n; ++j) s += std::log(static_cast<long double>(w[j]));
    return reciprocal ? -s : s;
}

}  // namespace

WeightSequence WeightSequence::from_kernel(const DiagonalKernel& k, std::size_t count) {
    WeightSequence ws;
    ws.lambda = k.lambda();
    ws.weights.resize(count);
    if (k.lambda()) {
        const long double lam = *k.lambda();
        for (std::size_t n = 0; n < count; ++n)
            ws.weights[n] = static_cast<double>(std::sqrt((n + 1.0L) / (lam + n)));
    } else {
        const auto a = k.coeffs_upto(count + 1);
        for (std::size_t n = 0; n < count; ++n) ws.weights[n] = std::sqrt(a[n] / a[n + 1]);
    }
    if (count > 0) {
        auto [lo, hi] = std::minmax_element(ws.weights.begin(), ws.weights.end());
        ws.inf = *lo;
        ws.sup = *hi;
    }
    return ws;
}

WeightSequence WeightSequence::from_weights(std::vector<double> weights) {
    for (double d : weights)
        if (!(d > 0.0) || !std::isfinite(d)) throw Error(ErrorKind::InvalidParameter, "weights must be positive and finite");
    WeightSequence ws;
    ws.weights = std::move(weights);
    if (!ws.weights.empty()) {
        auto [lo, hi] = std::minmax_element(ws.weights.begin(), ws.weights.end());
        ws.inf = *lo;
        ws.sup = *hi;
    }
    return ws;
}

TruncatedShift shift_from_kernel(const DiagonalKernel& k, int N) {
    if (N < 1) throw Error(ErrorKind::InvalidParameter, "dimension must be positive");
    if (!k.lambda() && k.coeffs().size() < static_cast<std::size_t>(N))
        throw Error(ErrorKind::TruncationInsufficient, "kernel has fewer than N coefficients");
    const std::size_t nw = N > 1 ? N - 1 : 0;
    WeightSequence ws;
    if (!k.lambda() && k.coeffs().size() == static_cast<std::size_t>(N)) {
        std::vector<double> d(nw);
        for (std::size_t n = 0; n < nw; ++n) d[n] = std::sqrt(k.coeffs()[n] / k.coeffs()[n + 1]);
        ws = WeightSequence::from_weights(std::move(d));
    } else {
        ws = WeightSequence::from_kernel(k, nw);
    }
    Mat T = Mat::Zero(N, N);
    for (std::size_t n = 0; n < nw; ++n) T(n, n + 1) = ws.weights[n];
    return TruncatedShift{std::move(T), std::move(ws), k};
}

SectionVector section(const DiagonalKernel& k, cplx w, int N) {
    require_in_disk(w);
    const auto a = k.coeffs_upto(N);
    Vec v(N);
    cplx p = 1.0;
    for (int n = 0; n < N; ++n) {
        v(n) = std::sqrt(a[n]) * p;
        p *= w;
    }
    return SectionVector{w, std::move(v)};
}

double eigen_residual(const TruncatedShift& T, cplx w) {
    const auto t = section(T.source, w, T.dim());
    return (T.matrix * t.coords - w * t.coords).norm();
}

std::vector<WeightProductSample> weight_product_asymptotics(const WeightSequence& ws, std::size_t n_max) {
    if (n_max >= ws.weights.size()) throw Error(ErrorKind::TruncationInsufficient, "n_max beyond stored weights");
    std::vector<WeightProductSample> out;
    out.reserve(n_max + 1);
    long double prod = 1.0L;
    for (std::size_t n = 0; n <= n_max; ++n) {
        prod *= ws.weights[n];
        WeightProductSample s;
        s.n = n;
        s.product = static_cast<double>(prod);
        if (ws.lambda) {
            const long double scale = std::pow(static_cast<long double>(n + 1), (1.0L - *ws.lambda) / 2.0L);
            s.normalized = static_cast<double>(prod / scale);
        }
        out.push_back(s);
    }
    return out;
}

double operator_norm_power(const WeightSequence& ws, std::size_t n, bool right_inverse) {
    const std::size_t len = ws.weights.size();
    if (n == 0) return 1.0;
    if (n + 1 > len) throw Error(ErrorKind::TruncationInsufficient, "power window exceeds stored weights");
    const std::size_t last = len - n;
    switch (monotonicity(ws.weights)) {
        case Monotone::Increasing: {
            const std::size_t k = right_inverse ? 0 : last;
            return static_cast<double>(std::exp(window_log_product(ws.weights, k, n, right_inverse)));
        }
        case Monotone::Decreasing: {
            const std::size_t k = right_inverse ? last : 0;
            return static_cast<double>(std::exp(window_log_product(ws.weights, k, n, right_inverse)));
        }
        case Monotone::Neither: break;
    }
    long double s = window_log_product(ws.weights, 0, n, right_inverse);
    long double best = s;
    for (std::size_t k = 1; k <= last; ++k) {
        const long double step = std::log(static_cast<long double>(ws.weights[k + n - 1])) -
                                 std::log(static_cast<long double>(ws.weights[k - 1]));
        s += right_inverse ? -step : step;
        best = std::max(best, s);
    }
    return static_cast<double>(std::exp(best));
}

}  // namespace cfbkit
