#include "coagstat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "coagstat/composition.hpp"
#include "coagstat/thread_pool.hpp"

namespace coag {

namespace {

constexpr int kChunks = 32;                      // fixed, independent of thread count
constexpr std::size_t kDenseChunkLimit = 65536;  // above this, chunks accumulate sparsely
constexpr int kMaxDim = 16;

/// Pairwise coagulation convolution over the sparse lattice state.
///
/// The pair sum runs once over ordered support pairs (alpha, beta) with
/// alpha <= beta in the fixed lexicographic index order, accumulating gain at
/// alpha+beta and loss at both sites.  Work is split into kChunks interleaved
/// stripes; every stripe accumulates into private buffers which are merged in
/// stripe order, so results are bit-identical for any worker count.
struct PairEngine {
    const TruncatedKernel& kernel;
    CompositionIndexer idxr;
    int d;
    int cap;      // largest indexable norm, floor(2M)
    double M;
    bool radial;
    std::vector<double> ktab;  // radial kernels: rate at integer norm pairs
    std::vector<double> ztab;  // gain cutoff at integer norms
    std::vector<double> src_dense;
    std::vector<std::uint32_t> src_sites;
    double residual_den;

    // active view of the current dense state
    std::vector<std::uint32_t> act_idx;
    std::vector<std::int32_t> act_norm;
    std::vector<double> act_val;

    bool dense_chunks;
    std::vector<std::vector<double>> gain_buf;
    std::vector<std::vector<std::uint32_t>> gain_stamp;
    std::vector<std::vector<std::uint32_t>> gain_list;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> gain_events;
    std::vector<std::vector<double>> loss_buf;
    std::uint32_t epoch = 0;

    std::vector<double> gain_main;
    std::vector<std::uint32_t> gain_main_stamp;
    std::vector<std::uint32_t> gain_main_list;

    long long rhs_calls = 0;
    double last_loss_rate = 0;  // max over support of (loss rate)/n, from the last rhs

    static int lattice_cap(const TruncatedKernel& k) {
        double m2 = 2.0 * k.params().M;
        if (!(m2 >= 1) || !(m2 < 1e9))
            throw std::invalid_argument("the solver needs a finite cutoff scale M");
        return static_cast<int>(std::floor(m2));
    }

    PairEngine(const TruncatedKernel& k, int dim, const Source& src)
        : kernel(k),
          idxr(dim, lattice_cap(k)),
          d(dim),
          cap(idxr.cap()),
          M(k.params().M),
          radial(k.radial()) {
        if (d > kMaxDim) throw std::invalid_argument("dimension too large for the solver");
        if (src.dim() != d) throw std::invalid_argument("source dimension mismatch");

        if (radial) {
            ktab.resize(static_cast<std::size_t>(cap + 1) * (cap + 1));
            for (int r = 1; r <= cap; ++r)
                for (int s = r; s <= cap; ++s) {
                    double v = kernel.eval_norms(r, s);
                    ktab[static_cast<std::size_t>(r) * (cap + 1) + s] = v;
                    ktab[static_cast<std::size_t>(s) * (cap + 1) + r] = v;
                }
        }
        ztab.resize(cap + 1);
        for (int r = 0; r <= cap; ++r) ztab[r] = zeta_weight(M, r);

        src_dense.assign(idxr.size(), 0.0);
        double j0 = 0, smax = 0;
        for (const auto& [alpha, rate] : src.entries()) {
            if (static_cast<double>(alpha.norm()) > cap)
                throw std::invalid_argument("source lies beyond the lattice cap 2M");
            std::uint32_t i = static_cast<std::uint32_t>(idxr.index_of(alpha));
            src_dense[i] += rate;
            src_sites.push_back(i);
            j0 += static_cast<double>(alpha.norm()) * rate;
            smax = std::max(smax, rate);
        }
        std::sort(src_sites.begin(), src_sites.end());
        residual_den = std::max(j0, smax);

        dense_chunks = idxr.size() <= kDenseChunkLimit;
        loss_buf.resize(kChunks);
        if (dense_chunks) {
            gain_buf.assign(kChunks, std::vector<double>(idxr.size(), 0.0));
            gain_stamp.assign(kChunks, std::vector<std::uint32_t>(idxr.size(), 0));
            gain_list.resize(kChunks);
        } else {
            gain_events.resize(kChunks);
        }
        gain_main.assign(idxr.size(), 0.0);
        gain_main_stamp.assign(idxr.size(), 0);
    }

    std::size_t rank_sum(std::span<const int> a, std::span<const int> b) const {
        int tmp[kMaxDim];
        for (int j = 0; j < d; ++j) tmp[j] = a[j] + b[j];
        return idxr.index_of(std::span<const int>(tmp, d));
    }

    void build_active(const std::vector<double>& y) {
        act_idx.clear();
        act_norm.clear();
        act_val.clear();
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] != 0.0) {
                act_idx.push_back(static_cast<std::uint32_t>(i));
                act_norm.push_back(idxr.norm_of(i));
                act_val.push_back(y[i]);
            }
        }
    }

    void chunk_pass(int c) {
        const std::size_t S = act_idx.size();
        auto& loss = loss_buf[c];
        const double* kt = radial ? ktab.data() : nullptr;
        const int stride = cap + 1;
        for (std::size_t apos = c; apos < S; apos += kChunks) {
            const std::uint32_t i = act_idx[apos];
            const int ri = act_norm[apos];
            const double ni = act_val[apos];
            const auto pa = idxr.parts_of(i);
            const double* ktrow = kt ? kt + static_cast<std::size_t>(ri) * stride : nullptr;
            for (std::size_t bpos = apos; bpos < S; ++bpos) {
                const int rj = act_norm[bpos];
                double k = ktrow ? ktrow[rj]
                                 : kernel.eval_parts(pa, idxr.parts_of(act_idx[bpos]));
                if (k == 0.0) continue;
                double w = k * ni * act_val[bpos];
                loss[apos] += w;
                if (bpos != apos) loss[bpos] += w;
                const int rt = ri + rj;
                if (rt <= cap && ztab[rt] != 0.0) {
                    double g = bpos == apos ? 0.5 * w : w;
                    std::uint32_t tidx = static_cast<std::uint32_t>(
                        rank_sum(pa, idxr.parts_of(act_idx[bpos])));
                    if (dense_chunks) {
                        if (gain_stamp[c][tidx] != epoch) {
                            gain_stamp[c][tidx] = epoch;
                            gain_buf[c][tidx] = g;
                            gain_list[c].push_back(tidx);
                        } else {
                            gain_buf[c][tidx] += g;
                        }
                    } else {
                        gain_events[c].emplace_back(tidx, g);
                    }
                }
            }
        }
    }

    /// out = full RHS; returns max |out| over its support.
    double rhs(const std::vector<double>& y, std::vector<double>& out) {
        ++rhs_calls;
        ++epoch;
        build_active(y);
        const std::size_t S = act_idx.size();
        for (int c = 0; c < kChunks; ++c) {
            loss_buf[c].assign(S, 0.0);
            if (dense_chunks)
                gain_list[c].clear();
            else
                gain_events[c].clear();
        }

        if (S >= 2 * kChunks) {
            ThreadPool::global().run(kChunks, [this](int c) { chunk_pass(c); });
        } else {
            for (int c = 0; c < kChunks; ++c) chunk_pass(c);
        }

        // merge in fixed chunk order
        gain_main_list.clear();
        auto main_accum = [this](std::uint32_t idx, double g) {
            if (gain_main_stamp[idx] != epoch) {
                gain_main_stamp[idx] = epoch;
                gain_main[idx] = g;
                gain_main_list.push_back(idx);
            } else {
                gain_main[idx] += g;
            }
        };
        for (int c = 0; c < kChunks; ++c) {
            if (dense_chunks) {
                for (std::uint32_t idx : gain_list[c]) main_accum(idx, gain_buf[c][idx]);
            } else {
                for (const auto& [idx, g] : gain_events[c]) main_accum(idx, g);
            }
        }

        out.assign(idxr.size(), 0.0);
        double maxabs = 0;
        for (std::uint32_t i : src_sites) out[i] = src_dense[i];
        for (std::uint32_t idx : gain_main_list)
            out[idx] += ztab[idxr.norm_of(idx)] * gain_main[idx];
        double loss_rate = 0;
        for (std::size_t apos = 0; apos < S; ++apos) {
            double l = 0;
            for (int c = 0; c < kChunks; ++c) l += loss_buf[c][apos];
            out[act_idx[apos]] -= l;
            loss_rate = std::max(loss_rate, l / act_val[apos]);
        }
        last_loss_rate = loss_rate;
        for (std::uint32_t idx : gain_main_list) maxabs = std::max(maxabs, std::abs(out[idx]));
        for (std::size_t apos = 0; apos < S; ++apos)
            maxabs = std::max(maxabs, std::abs(out[act_idx[apos]]));
        for (std::uint32_t i : src_sites) maxabs = std::max(maxabs, std::abs(out[i]));
        if (!std::isfinite(maxabs))
            throw SolverError("rate magnitude overflow in the coagulation RHS");
        return maxabs;
    }
};

void state_to_dense(const ClusterDistribution& state, const CompositionIndexer& idxr,
                    std::vector<double>& y) {
    y.assign(idxr.size(), 0.0);
    for (const auto& [alpha, n] : state.entries()) y[idxr.index_of(alpha)] = n;
}

ClusterDistribution dense_to_state(const std::vector<double>& y,
                                   const CompositionIndexer& idxr, double cap) {
    ClusterDistribution state(idxr.dim(), cap);
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] != 0.0) state.set(idxr.composition_of(i), y[i]);
    return state;
}

/// Bogacki-Shampine 3(2) embedded pair with positivity-limited step size.
struct Integrator {
    PairEngine eng;
    SolverConfig cfg;
    std::vector<double> y, k1, k2, k3, k4, ytmp, ycand;
    double t = 0;
    double dt;
    double residual = std::numeric_limits<double>::infinity();
    double loss_rate = 0;  // stiffness scale of the current state

    Integrator(const ClusterDistribution& state, const SolverConfig& c,
               const TruncatedKernel& kernel, const Source& src)
        : eng(kernel, state.dim(), src), cfg(c), dt(c.dt_init) {
        if (state.cap() > 2.0 * kernel.params().M + 1e-9)
            throw std::invalid_argument("state cap exceeds the kernel support 2M");
        if (!(cfg.dt_init > 0) || !(cfg.dt_max > 0) || !(cfg.safety > 0) ||
            cfg.safety > 1 || !(cfg.steady_tol > 0) || cfg.steady_tol >= 1)
            throw std::invalid_argument("invalid solver configuration");
        state_to_dense(state, eng.idxr, y);
        const std::size_t n = y.size();
        k2.assign(n, 0.0);
        k3.assign(n, 0.0);
        k4.assign(n, 0.0);
        ytmp.assign(n, 0.0);
        ycand.assign(n, 0.0);
        refresh_k1();
    }

    void refresh_k1() {
        double maxabs = eng.rhs(y, k1);
        residual = eng.residual_den > 0 ? maxabs / eng.residual_den : maxabs;
        loss_rate = eng.last_loss_rate;
    }

    static bool axpy_nonneg(std::vector<double>& out, const std::vector<double>& y,
                            double a, const std::vector<double>& k) {
        bool ok = true;
        for (std::size_t i = 0; i < y.size(); ++i) {
            double v = y[i] + a * k[i];
            if (v < 0.0) ok = false;
            out[i] = v;
        }
        return ok;
    }

    enum class Outcome { Accepted, RejectedNegative, RejectedError };

    Outcome attempt(double& err_out) {
        if (!axpy_nonneg(ytmp, y, 0.5 * dt, k1)) return Outcome::RejectedNegative;
        eng.rhs(ytmp, k2);
        if (!axpy_nonneg(ytmp, y, 0.75 * dt, k2)) return Outcome::RejectedNegative;
        eng.rhs(ytmp, k3);
        bool ok = true;
        ycand.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            double v = y[i] + dt * (2.0 / 9.0 * k1[i] + 1.0 / 3.0 * k2[i] + 4.0 / 9.0 * k3[i]);
            if (v < 0.0) ok = false;
            ycand[i] = v;
        }
        if (!ok) return Outcome::RejectedNegative;
        eng.rhs(ycand, k4);
        // error measured against the population scale: newly seeded tail sites
        // must not throttle the march to the fixed point
        double total = 0, total_cand = 0;
        for (double v : y) total += v;
        for (double v : ycand) total_cand += std::abs(v);
        total = std::max(total, total_cand);
        double err = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            double e = dt * (-5.0 / 72.0 * k1[i] + 1.0 / 12.0 * k2[i] + 1.0 / 9.0 * k3[i] -
                             1.0 / 8.0 * k4[i]);
            double scale = cfg.err_abs + cfg.err_rel * std::max(total, std::abs(ycand[i]));
            err = std::max(err, std::abs(e) / scale);
        }
        err_out = err;
        return err > 1.0 ? Outcome::RejectedError : Outcome::Accepted;
    }

    /// Advance by one accepted step; returns the dt used.
    double advance() {
        while (true) {
            if (dt < 1e-14 * cfg.dt_init)
                throw SolverError("time step underflow below 1e-14 * dt_init; "
                                  "the truncated system is too stiff for the explicit scheme");
            // keep the step inside the stability region of the explicit pair;
            // at the boundary the iteration would hover instead of contracting
            // onto the stationary state
            if (loss_rate > 0) dt = std::min(dt, 0.8 / loss_rate);
            double err = 0;
            Outcome o = attempt(err);
            if (o == Outcome::RejectedNegative) {
                dt *= 0.5;
                continue;
            }
            if (o == Outcome::RejectedError) {
                dt *= std::clamp(cfg.safety * std::pow(err, -1.0 / 3.0), 0.1, 0.9);
                continue;
            }
            double used = dt;
            t += used;
            y.swap(ycand);
            // hard floor: prune concentrations below the sparse-support floor
            bool pruned = false;
            for (double& v : y)
                if (v != 0.0 && v < kConcentrationFloor) {
                    v = 0.0;
                    pruned = true;
                }
            if (pruned) {
                refresh_k1();
            } else {
                // first-same-as-last: k4 was evaluated at the accepted state
                k1.swap(k4);
                loss_rate = eng.last_loss_rate;
                double maxabs = 0;
                for (double v : k1) maxabs = std::max(maxabs, std::abs(v));
                residual = eng.residual_den > 0 ? maxabs / eng.residual_den : maxabs;
            }
            double grow = err > 0 ? cfg.safety * std::pow(err, -1.0 / 3.0) : 5.0;
            dt = std::min(cfg.dt_max, dt * std::clamp(grow, 0.2, 5.0));
            return used;
        }
    }

    double total_number() const {
        double s = 0;
        for (double v : y) s += v;
        return s;
    }
};

}  // namespace

std::map<Composition, double> rhs_map(const ClusterDistribution& state,
                                      const TruncatedKernel& kernel, const Source& src) {
    if (state.dim() != src.dim())
        throw std::invalid_argument("state and source dimensions differ");
    if (state.cap() > 2.0 * kernel.params().M + 1e-9)
        throw std::invalid_argument("state cap exceeds the kernel support 2M");
    PairEngine eng(kernel, state.dim(), src);
    std::vector<double> y, out;
    state_to_dense(state, eng.idxr, y);
    eng.rhs(y, out);
    std::map<Composition, double> res;
    for (std::uint32_t i : eng.act_idx) res[eng.idxr.composition_of(i)] = out[i];
    for (std::uint32_t i : eng.src_sites) res[eng.idxr.composition_of(i)] = out[i];
    for (std::uint32_t i : eng.gain_main_list) res[eng.idxr.composition_of(i)] = out[i];
    return res;
}

std::pair<ClusterDistribution, double> step(const ClusterDistribution& state,
                                            const SolverConfig& cfg,
                                            const TruncatedKernel& kernel, const Source& src) {
    Integrator integ(state, cfg, kernel, src);
    double used = integ.advance();
    return {dense_to_state(integ.y, integ.eng.idxr, state.cap() > 0 ? state.cap()
                                                                    : 2.0 * kernel.params().M),
            used};
}

SteadyResult evolve_to_steady(const ClusterDistribution& initial, const SolverConfig& cfg,
                              const TruncatedKernel& kernel, const Source& src,
                              double snapshot_interval, const SnapshotCallback& on_snapshot) {
    Integrator integ(initial, cfg, kernel, src);
    const int d = initial.dim();
    const double cap = 2.0 * kernel.params().M;

    SteadyResult res;
    auto record = [&](double dt_used) {
        TimeSeries::Row row;
        row.t = integ.t;
        row.residual = integ.residual;
        row.dt = dt_used;
        row.mass.assign(d, 0.0);
        double total = 0;
        for (std::size_t i = 0; i < integ.y.size(); ++i) {
            double v = integ.y[i];
            if (v == 0.0) continue;
            total += v;
            auto parts = integ.eng.idxr.parts_of(i);
            for (int j = 0; j < d; ++j) row.mass[j] += parts[j] * v;
        }
        row.total = total;
        res.max_total_number = std::max(res.max_total_number, total);
        res.series.rows.push_back(row);
    };

    record(0.0);
    long long record_stride = 1;
    double next_snapshot = snapshot_interval > 0 ? snapshot_interval
                                                 : std::numeric_limits<double>::infinity();
    res.converged = integ.residual <= cfg.steady_tol;
    while (!res.converged) {
        if (integ.t >= cfg.max_time || res.steps >= cfg.max_steps) break;
        double used = integ.advance();
        ++res.steps;
        if (res.steps % record_stride == 0) {
            record(used);
            if (res.series.rows.size() > 40000) {
                auto& rows = res.series.rows;
                std::size_t keep = 0;
                for (std::size_t i = 0; i < rows.size(); i += 2) rows[keep++] = rows[i];
                rows.resize(keep);
                record_stride *= 2;
            }
        } else {
            // still track the invariant-region statistic off-record
            res.max_total_number = std::max(res.max_total_number, integ.total_number());
        }
        if (integ.t >= next_snapshot && on_snapshot) {
            on_snapshot(integ.t, dense_to_state(integ.y, integ.eng.idxr, cap));
            while (next_snapshot <= integ.t) next_snapshot += snapshot_interval;
        }
        res.converged = integ.residual <= cfg.steady_tol;
    }

    if (res.series.rows.empty() || res.series.rows.back().t != integ.t) record(integ.dt);
    res.state = dense_to_state(integ.y, integ.eng.idxr, cap);
    res.residual = integ.residual;
    res.t_final = integ.t;
    res.rhs_evaluations = integ.eng.rhs_calls;
    for (std::size_t i = 0; i < integ.y.size(); ++i)
        if (integ.eng.idxr.norm_of(i) > kernel.params().M) res.mass_beyond_cutoff += integ.y[i];
    return res;
}

}  // namespace coag
