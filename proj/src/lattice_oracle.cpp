#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pathhedge/superhedge.hpp"

namespace pathhedge {

namespace {

// Upper concave envelope of the points (xs[i], ys[i]) (xs strictly
// increasing), evaluated at every xs[i]. This is the exact value of
// min_phi max_i { ys[i] - phi (xs[i] - x) }: the hedger pins the adversary
// to the chord structure of the candidate set.
void concave_envelope(const std::vector<double>& xs, const std::vector<double>& ys,
                      std::vector<double>& out) {
    const std::size_t n = xs.size();
    // upper hull, monotone chain
    static thread_local std::vector<std::size_t> hull;
    hull.clear();
    for (std::size_t i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            const std::size_t j = hull[hull.size() - 1], k = hull[hull.size() - 2];
            const double cross = (xs[j] - xs[k]) * (ys[i] - ys[k]) -
                                 (ys[j] - ys[k]) * (xs[i] - xs[k]);
            if (cross >= 0.0)
                hull.pop_back();  // j below or on the chord k -> i
            else
                break;
        }
        hull.push_back(i);
    }
    out.resize(n);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (seg + 1 < hull.size() && xs[hull[seg + 1]] < xs[i]) ++seg;
        if (seg + 1 >= hull.size()) {
            out[i] = ys[hull.back()];
            continue;
        }
        const std::size_t lo = hull[seg], hi = hull[seg + 1];
        const double w = (xs[i] - xs[lo]) / (xs[hi] - xs[lo]);
        out[i] = ys[lo] + w * (ys[hi] - ys[lo]);
    }
}

double interp(const std::vector<double>& grid, const std::vector<double>& vals, double x) {
    if (x <= grid.front()) return vals.front();
    if (x >= grid.back()) return vals.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - grid[lo]) / (grid[hi] - grid[lo]);
    return vals[lo] + w * (vals[hi] - vals[lo]);
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return out;
}

}  // namespace

double lattice_minimax_oracle(const AsianParams& P, const OracleConfig& cfg, double t0,
                              double avg0, double spot0) {
    if (!P.bounds.valid()) throw std::invalid_argument("oracle: need 0 <= a < b");
    if (cfg.n_steps < 1 || cfg.value_grid < 2 || cfg.avg_grid < 2)
        throw std::invalid_argument("oracle: grids too small");
    const double T = P.maturity, K = P.strike;
    const double a = P.bounds.a, b = P.bounds.b;
    if (t0 < -kTimeTol || !time_lt(t0, T)) throw std::invalid_argument("oracle: need 0 <= t0 < T");
    const double delta =
        cfg.delta_margin > 0.0 ? cfg.delta_margin : (b - a) / (1e6 * cfg.value_grid);
    const double lo = a + delta, hi = b - delta;
    if (!(spot0 > a && spot0 < b)) throw std::domain_error("oracle: spot out of bounds");

    const int N = cfg.n_steps;
    const double dt = (T - t0) / N;
    const std::vector<double> xg = linspace(lo, hi, cfg.value_grid);
    const std::size_t V = xg.size();

    auto terminal = [&](double A) { return std::max(0.0, A / T - K); };

    // values[j][ia * V + iv] = U at time t0 + j dt, avg node ia, spot node iv
    std::vector<double> next, cur, g(V), env(V);
    std::vector<double> avg_next, avg_cur;

    for (int j = N - 1; j >= 0; --j) {
        const double tau_j = j * dt;
        avg_cur = (j == 0) ? std::vector<double>{avg0}
                           : linspace(avg0 + lo * tau_j, avg0 + hi * tau_j, cfg.avg_grid);
        cur.assign(avg_cur.size() * V, 0.0);
        for (std::size_t ia = 0; ia < avg_cur.size(); ++ia) {
            const double A = avg_cur[ia];
            for (std::size_t iv = 0; iv < V; ++iv) {
                const double Anew = A + xg[iv] * dt;
                g[iv] = (j == N - 1)
                            ? terminal(Anew)
                            : [&] {
                                  // interpolate U_{j+1}(Anew, xg[iv]) in the avg axis
                                  const std::size_t M = avg_next.size();
                                  if (M == 1) return next[iv];
                                  double w = (Anew - avg_next.front()) /
                                             (avg_next.back() - avg_next.front());
                                  w = std::clamp(w, 0.0, 1.0);
                                  const double pos = w * static_cast<double>(M - 1);
                                  const std::size_t k0 = std::min(
                                      static_cast<std::size_t>(pos), M - 2);
                                  const double frac = pos - static_cast<double>(k0);
                                  return next[k0 * V + iv] * (1.0 - frac) +
                                         next[(k0 + 1) * V + iv] * frac;
                              }();
            }
            concave_envelope(xg, g, env);
            for (std::size_t iv = 0; iv < V; ++iv) cur[ia * V + iv] = env[iv];
        }
        next.swap(cur);
        avg_next = avg_cur;
    }

    // evaluate at spot0 on the final (j = 0) slice, single avg node
    return interp(xg, std::vector<double>(next.begin(), next.begin() + static_cast<long>(V)),
                  spot0);
}

}  // namespace pathhedge
