#include "wipad/backoff_chain.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wipad {

namespace {

// Dense Gaussian elimination with partial pivoting on the augmented
// system; a is row-major n x n, b the right-hand side. Solution lands in b.
void solve_linear(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a[r * n + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-300) throw std::runtime_error("stationary solve: singular matrix");
        if (pivot != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        double acc = b[col];
        for (std::size_t c = col + 1; c < n; ++c) acc -= a[col * n + c] * b[c];
        b[col] = acc / a[col * n + col];
    }
}

}  // namespace

BackoffChainOracle::BackoffChainOracle(double p_f, double p_coll,
                                       const DcfParams& params) {
    if (p_f < 0.0 || p_f > 1.0) {
        throw std::invalid_argument("backoff chain: p_f out of [0, 1]");
    }
    if (p_coll < 0.0 || p_coll >= 1.0) {
        throw std::invalid_argument("backoff chain: p_coll out of [0, 1)");
    }
    windows_ = cw_schedule(params);

    offsets_.resize(windows_.size() + 1);
    offsets_[0] = 0;
    for (std::size_t i = 0; i < windows_.size(); ++i) {
        offsets_[i + 1] = offsets_[i] + static_cast<std::size_t>(windows_[i]);
    }

    const int m = static_cast<int>(windows_.size()) - 1;
    const int w0 = windows_[0];
    rows_.resize(state_count());

    for (int i = 0; i <= m; ++i) {
        const int wi = windows_[static_cast<std::size_t>(i)];
        for (int k = 0; k < wi; ++k) {
            auto& row = rows_[index(i, k)];
            if (k > 0) {
                // busy slot freezes the timer, idle slot decrements it
                row.push_back({index(i, k), p_coll});
                row.push_back({index(i, k - 1), 1.0 - p_coll});
                continue;
            }
            if (i < m) {
                const int wn = windows_[static_cast<std::size_t>(i) + 1];
                for (int j = 0; j < w0; ++j) {
                    row.push_back({index(0, j), (1.0 - p_f) / w0});
                }
                for (int j = 0; j < wn; ++j) {
                    row.push_back({index(i + 1, j), p_f / wn});
                }
            } else {
                // retry limit: back to stage 0 regardless of outcome
                for (int j = 0; j < w0; ++j) {
                    row.push_back({index(0, j), 1.0 / w0});
                }
            }
        }
    }
    solve_stationary();
}

std::size_t BackoffChainOracle::index(int stage, int timer) const {
    return offsets_[static_cast<std::size_t>(stage)] + static_cast<std::size_t>(timer);
}

double BackoffChainOracle::transition(std::size_t from, std::size_t to) const {
    double p = 0.0;
    for (const auto& e : rows_[from]) {
        if (e.to == to) p += e.prob;
    }
    return p;
}

double BackoffChainOracle::row_sum(std::size_t from) const {
    double s = 0.0;
    for (const auto& e : rows_[from]) s += e.prob;
    return s;
}

double BackoffChainOracle::stationary(int stage, int timer) const {
    return pi_[index(stage, timer)];
}

double BackoffChainOracle::tx_probability() const {
    double tau = 0.0;
    for (std::size_t i = 0; i + 1 < offsets_.size(); ++i) tau += pi_[offsets_[i]];
    return tau;
}

void BackoffChainOracle::solve_stationary() {
    const std::size_t n = state_count();
    pi_.assign(n, 0.0);

    if (n <= 1200) {
        // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
        std::vector<double> a(n * n, 0.0);
        std::vector<double> b(n, 0.0);
        for (std::size_t from = 0; from < n; ++from) {
            for (const auto& e : rows_[from]) a[e.to * n + from] += e.prob;
        }
        for (std::size_t d = 0; d < n; ++d) a[d * n + d] -= 1.0;
        for (std::size_t c = 0; c < n; ++c) a[(n - 1) * n + c] = 1.0;
        b[n - 1] = 1.0;
        solve_linear(a, b, n);
        pi_ = std::move(b);
    } else {
        // Large chains: power iteration on the sparse rows.
        std::vector<double> cur(n, 1.0 / static_cast<double>(n));
        std::vector<double> next(n);
        double delta = 1.0;
        for (int it = 0; it < 2'000'000 && delta > 1e-14; ++it) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t from = 0; from < n; ++from) {
                const double mass = cur[from];
                if (mass == 0.0) continue;
                for (const auto& e : rows_[from]) next[e.to] += mass * e.prob;
            }
            delta = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                delta = std::max(delta, std::abs(next[s] - cur[s]));
            }
            cur.swap(next);
        }
        if (delta > 1e-12) {
            throw std::runtime_error("stationary solve: power iteration stalled");
        }
        pi_ = std::move(cur);
    }

    double total = 0.0;
    for (double& v : pi_) {
        if (v < 0.0 && v > -1e-12) v = 0.0;
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::runtime_error("stationary solve: distribution does not normalize");
    }
    for (double& v : pi_) v /= total;
}

BackoffChainOracle stationary_oracle(double p_f, double p_coll,
                                     const DcfParams& params) {
    return BackoffChainOracle(p_f, p_coll, params);
}

}  // namespace wipad
