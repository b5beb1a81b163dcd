#include "line_prox.hpp"

#include <algorithm>
#include <cmath>

#include "ftv/grid.hpp"

namespace ftv::detail {

// The dual of each edge is tracked through the piecewise-linear derivative of
// the partial objective; knots are consumed from both ends, so the work is
// amortized linear.
void chain_tv_prox(std::span<const double> y, std::span<double> beta, double lam) {
    const std::size_t n = y.size();
    if (n == 0) {
        return;
    }
    if (n == 1 || lam == 0.0) {
        std::copy(y.begin(), y.end(), beta.begin());
        return;
    }
    thread_local std::vector<double> x, a, b, tm, tp;
    x.resize(2 * n);
    a.resize(2 * n);
    b.resize(2 * n);
    tm.resize(n);
    tp.resize(n);

    std::ptrdiff_t l = static_cast<std::ptrdiff_t>(n) - 1;
    std::ptrdiff_t r = static_cast<std::ptrdiff_t>(n);
    tm[0] = -lam + y[0];
    tp[0] = lam + y[0];
    x[l] = tm[0];
    x[r] = tp[0];
    a[l] = 1.0;
    b[l] = -y[0] + lam;
    a[r] = -1.0;
    b[r] = y[0] + lam;
    double afirst = 1.0;
    double bfirst = -lam - y[1];
    double alast = -1.0;
    double blast = -lam + y[1];
    double alo, blo, ahi, bhi;
    std::ptrdiff_t lo, hi;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        alo = afirst;
        blo = bfirst;
        for (lo = l; lo <= r; ++lo) {
            if (alo * x[lo] + blo > -lam) {
                break;
            }
            alo += a[lo];
            blo += b[lo];
        }
        tm[k] = (-lam - blo) / alo;
        l = lo - 1;
        x[l] = tm[k];

        ahi = alast;
        bhi = blast;
        for (hi = r; hi >= l; --hi) {
            if (-ahi * x[hi] - bhi < lam) {
                break;
            }
            ahi += a[hi];
            bhi += b[hi];
        }
        tp[k] = (lam + bhi) / (-ahi);
        r = hi + 1;
        x[r] = tp[k];

        a[l] = alo;
        b[l] = blo + lam;
        a[r] = ahi;
        b[r] = bhi + lam;
        afirst = 1.0;
        bfirst = -lam - y[k + 1];
        alast = -1.0;
        blast = -lam + y[k + 1];
    }
    alo = afirst;
    blo = bfirst;
    for (lo = l; lo <= r; ++lo) {
        if (alo * x[lo] + blo > 0.0) {
            break;
        }
        alo += a[lo];
        blo += b[lo];
    }
    beta[n - 1] = -blo / alo;
    for (std::size_t k = n - 1; k-- > 0;) {
        beta[k] = std::clamp(beta[k + 1], tm[k], tp[k]);
    }
}

// For a fixed wrap multiplier q the ring problem is a chain problem with
// y_0 - q and y_{n-1} + q; h(q) = x_0(q) - x_{n-1}(q) is nonincreasing and
// piecewise linear, and its root in [-lambda, lambda] gives the ring solution.
void ring_tv_prox(std::span<const double> y, std::span<double> out, double lam, double& q_warm) {
    const std::size_t n = y.size();
    if (n < 2 || lam == 0.0) {
        std::copy(y.begin(), y.end(), out.begin());
        q_warm = 0.0;
        return;
    }
    thread_local std::vector<double> shifted;
    shifted.assign(y.begin(), y.end());
    auto h = [&](double q) {
        shifted[0] = y[0] - q;
        shifted[n - 1] = y[n - 1] + q;
        chain_tv_prox(shifted, out, lam);
        return out[0] - out[n - 1];
    };
    auto settle = [&](double q) {
        q_warm = q;
        h(q);
    };

    double q = std::clamp(q_warm, -lam, lam);
    double hq = h(q);
    if (hq == 0.0) {
        q_warm = q;
        return;
    }
    // bracket the root by doubling steps from the warm start
    double a, b, ha, hb;
    double step = 1e-3 * lam;
    if (hq > 0.0) {
        a = q;
        ha = hq;
        for (;;) {
            b = std::min(lam, a + step);
            hb = h(b);
            if (hb <= 0.0 || b == lam) {
                break;
            }
            a = b;
            ha = hb;
            step *= 4.0;
        }
        if (hb >= 0.0) {
            q_warm = b;  // h is evaluated at b already
            return;
        }
    } else {
        b = q;
        hb = hq;
        for (;;) {
            a = std::max(-lam, b - step);
            ha = h(a);
            if (ha >= 0.0 || a == -lam) {
                break;
            }
            b = a;
            hb = ha;
            step *= 4.0;
        }
        if (ha <= 0.0) {
            q_warm = a;
            return;
        }
    }
    // Illinois regula falsi on the bracket a < b with h(a) > 0 > h(b)
    int side = 0;
    const double width_tol = 1e-14 * lam;
    for (int it = 0; it < 200; ++it) {
        const double m = std::clamp((a * hb - b * ha) / (hb - ha), a, b);
        const double hm = h(m);
        if (hm == 0.0 || b - a <= width_tol) {
            q_warm = m;
            return;
        }
        if (hm > 0.0) {
            a = m;
            ha = hm;
            if (side == 1) {
                hb *= 0.5;
            }
            side = 1;
        } else {
            b = m;
            hb = hm;
            if (side == -1) {
                ha *= 0.5;
            }
            side = -1;
        }
        if (std::abs(hm) <= 1e-15 * (std::abs(out[0]) + std::abs(out[n - 1]) + lam)) {
            q_warm = m;
            return;
        }
    }
    settle(0.5 * (a + b));
}

LineProx::LineProx(int dim, int side, int axis)
    : side_(side),
      stride_(ipow(side, dim - 1 - axis)),
      block_(stride_ * side),
      lines_(ipow(side, dim - 1)),
      cells_(ipow(side, dim)) {}

void LineProx::apply(std::span<double> values, double lambda, std::vector<double>& wrap_duals) const {
    if (wrap_duals.size() != lines_) {
        wrap_duals.assign(lines_, 0.0);
    }
    thread_local std::vector<double> in, out;
    in.resize(side_);
    out.resize(side_);
    std::size_t line = 0;
    for (std::size_t base = 0; base < cells_; base += block_) {
        for (std::size_t r = 0; r < stride_; ++r, ++line) {
            for (int k = 0; k < side_; ++k) {
                in[k] = values[base + k * stride_ + r];
            }
            ring_tv_prox(in, out, lambda, wrap_duals[line]);
            for (int k = 0; k < side_; ++k) {
                values[base + k * stride_ + r] = out[k];
            }
        }
    }
}

} // namespace ftv::detail
