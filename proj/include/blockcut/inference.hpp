#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>
#include <vector>

#include "blockcut/dl.hpp"
#include "blockcut/errors.hpp"
#include "blockcut/graph.hpp"
#include "blockcut/parallel.hpp"
#include "blockcut/partition.hpp"

namespace blockcut {

enum class FitModel { dc, ndc, chosen };

inline const char* to_string(FitModel m) {
    switch (m) {
        case FitModel::dc: return "dc";
        case FitModel::ndc: return "ndc";
        case FitModel::chosen: return "chosen";
    }
    return "";
}

struct InferenceConfig {
    FitModel model = FitModel::chosen;
    double beta = 1.0;
    bool edges_dl = true;
    std::uint64_t seed = 0;
    std::size_t restarts = 5;
    std::size_t move_sweep_limit = 16;
    std::size_t merge_candidates_per_block = 8; // sampling width when B > 64
    int num_threads = 1;

    DlConfig dl_config(SbmModel m) const { return DlConfig{m, beta, edges_dl}; }
};

struct FitResult {
    Partition partition;
    DlReport report;
    SbmModel model_selected = SbmModel::dc;
    std::vector<double> restart_totals;             // best total per restart
    std::vector<std::vector<double>> incumbent_log; // non-increasing, per restart
    bool chosen_tie = false;
    std::optional<double> alternative_total; // the other model's best (chosen only)
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Mutable block assignment with the sparse aggregates needed to evaluate
/// description-length changes of single-node moves and block merges.
/// Block ids live in fixed slots 0..N-1; empty slots are reusable, so the
/// block count can grow during sweeps (capped at N).
class BlockState {
  public:
    BlockState(const Graph& g, const Partition& p, const DlConfig& cfg)
        : g_(&g), cfg_(cfg), assign_(p.assignment().begin(), p.assignment().end()) {
        const std::size_t n = g.num_nodes();
        if (p.num_nodes() != n) throw domain_error("BlockState: partition does not cover graph");
        nsize_.assign(n, 0);
        dsum_.assign(n, 0);
        rows_.assign(n, {});
        for (NodeId v = 0; v < n; ++v) {
            std::uint32_t r = assign_[v];
            ++nsize_[r];
            dsum_[r] += g.degree(v);
            for (NodeId w : g.neighbors(v)) {
                if (w < v) continue;
                std::uint32_t s = assign_[w];
                if (r == s) {
                    rows_[r][r] += 2;
                } else {
                    ++rows_[r][s];
                    ++rows_[s][r];
                }
            }
        }
        num_blocks_ = 0;
        for (std::size_t slot = 0; slot < n; ++slot) {
            if (nsize_[slot] > 0)
                ++num_blocks_;
            else
                empty_slots_.insert(static_cast<std::uint32_t>(slot));
        }
    }

    std::size_t num_blocks() const { return num_blocks_; }
    std::uint32_t block_of(NodeId v) const { return assign_[v]; }
    std::uint64_t block_size(std::uint32_t slot) const { return nsize_[slot]; }

    Partition to_partition() const {
        return Partition::from_assignment(std::vector<ClusterId>(assign_.begin(), assign_.end()));
    }

    /// Exact description length of the current state, through the same
    /// formulas as compute_dl.
    double full_dl() const {
        BlockStats stats;
        stats.num_nodes = g_->num_nodes();
        stats.num_edges = g_->num_edges();
        std::vector<std::uint32_t> dense(nsize_.size(), 0);
        std::uint32_t next = 0;
        for (std::size_t slot = 0; slot < nsize_.size(); ++slot) {
            if (nsize_[slot] == 0) continue;
            dense[slot] = next++;
            stats.block_sizes.push_back(nsize_[slot]);
            stats.block_degree_sums.push_back(dsum_[slot]);
        }
        stats.num_blocks = next;
        stats.node_degrees.resize(g_->num_nodes());
        for (NodeId v = 0; v < g_->num_nodes(); ++v) stats.node_degrees[v] = g_->degree(v);
        for (std::size_t slot = 0; slot < rows_.size(); ++slot) {
            for (auto [t, count] : rows_[slot]) {
                if (t < slot) continue;
                stats.block_pair_edges.emplace_back(dense[slot], dense[t], count);
            }
        }
        std::sort(stats.block_pair_edges.begin(), stats.block_pair_edges.end());
        return report_from_stats(stats, cfg_).total;
    }

    std::optional<std::uint32_t> lowest_empty_slot() const {
        if (empty_slots_.empty()) return std::nullopt;
        return *empty_slots_.begin();
    }

    /// Distinct blocks adjacent to v (sorted), excluding v's own block.
    std::vector<std::uint32_t> neighbor_blocks(NodeId v) const {
        std::vector<std::uint32_t> out;
        out.reserve(g_->degree(v));
        std::uint32_t r = assign_[v];
        for (NodeId w : g_->neighbors(v)) {
            std::uint32_t t = assign_[w];
            if (t != r) out.push_back(t);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    /// Blocks adjacent to block r (sorted), from its nonzero row entries.
    std::vector<std::uint32_t> adjacent_blocks(std::uint32_t r) const {
        std::vector<std::uint32_t> out;
        out.reserve(rows_[r].size());
        for (auto [t, count] : rows_[r])
            if (t != r) out.push_back(t);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// DL change of relocating v to `target`, by simulating the move and
    /// undoing it. Only terms touching the two affected blocks enter.
    double move_delta(NodeId v, std::uint32_t target) {
        std::uint32_t r = assign_[v];
        if (target == r) return 0.0;
        long double before = local_terms(r, target) + b_terms(num_blocks_);
        apply_move(v, target);
        long double after = local_terms(r, target) + b_terms(num_blocks_);
        apply_move(v, r); // undo
        return static_cast<double>(after - before);
    }

    void apply_move(NodeId v, std::uint32_t target) {
        std::uint32_t r = assign_[v];
        if (target == r) return;
        for (NodeId w : g_->neighbors(v)) {
            std::uint32_t t = assign_[w];
            if (t == r) {
                sub_entry(r, r, 2);
            } else {
                sub_entry(r, t, 1);
                sub_entry(t, r, 1);
            }
        }
        dsum_[r] -= g_->degree(v);
        if (--nsize_[r] == 0) {
            empty_slots_.insert(r);
            --num_blocks_;
        }
        if (nsize_[target] == 0) {
            empty_slots_.erase(target);
            ++num_blocks_;
        }
        ++nsize_[target];
        dsum_[target] += g_->degree(v);
        assign_[v] = target;
        for (NodeId w : g_->neighbors(v)) {
            std::uint32_t t = assign_[w];
            if (t == target) {
                rows_[target][target] += 2;
            } else {
                ++rows_[target][t];
                ++rows_[t][target];
            }
        }
    }

    /// DL change of merging block s into block r, computed algebraically
    /// (merges are not cheaply reversible).
    double merge_delta(std::uint32_t r, std::uint32_t s) const {
        long double before = local_terms(r, s) + b_terms(num_blocks_);
        long double after = b_terms(num_blocks_ - 1);
        const bool dc = cfg_.model == SbmModel::dc;
        const std::uint64_t n = nsize_[r] + nsize_[s];
        const std::uint64_t e = dsum_[r] + dsum_[s];
        after -= cfg_.beta * lfact(n);
        if (dc) {
            after += lfact(e);
            after += cfg_.beta * lbinom(n + e - 1, e);
        }
        std::uint64_t cross = entry(r, s);
        std::uint64_t diag = entry(r, r) + entry(s, s) + 2 * cross;
        after += pair_term(n, n, diag, true);
        for (auto [t, count] : rows_[r]) {
            if (t == r || t == s) continue;
            after += pair_term(n, nsize_[t], count + entry(s, t), false);
        }
        for (auto [t, count] : rows_[s]) {
            if (t == r || t == s) continue;
            if (rows_[r].count(t)) continue; // already merged into the row-r pass
            after += pair_term(n, nsize_[t], count, false);
        }
        return static_cast<double>(after - before);
    }

    void apply_merge(std::uint32_t r, std::uint32_t s) {
        for (NodeId v = 0; v < assign_.size(); ++v)
            if (assign_[v] == s) assign_[v] = r;
        std::uint64_t cross = entry(r, s);
        std::uint64_t diag = entry(r, r) + entry(s, s) + 2 * cross;
        rows_[r].erase(s);
        rows_[s].erase(r);
        rows_[s].erase(s);
        if (diag > 0)
            rows_[r][r] = diag;
        else
            rows_[r].erase(r);
        for (auto [t, count] : rows_[s]) {
            rows_[r][t] += count;
            rows_[t][r] += count;
            rows_[t].erase(s);
        }
        rows_[s].clear();
        nsize_[r] += nsize_[s];
        dsum_[r] += dsum_[s];
        nsize_[s] = 0;
        dsum_[s] = 0;
        empty_slots_.insert(s);
        --num_blocks_;
    }

    std::vector<std::uint32_t> nonempty_blocks() const {
        std::vector<std::uint32_t> out;
        out.reserve(num_blocks_);
        for (std::size_t slot = 0; slot < nsize_.size(); ++slot)
            if (nsize_[slot] > 0) out.push_back(static_cast<std::uint32_t>(slot));
        return out;
    }

  private:
    static long double lfact(std::uint64_t n) {
        return std::lgammal(static_cast<long double>(n) + 1.0L);
    }
    static long double lbinom(std::uint64_t n, std::uint64_t k) {
        if (k == 0 || k == n) return 0.0L;
        return lfact(n) - lfact(k) - lfact(n - k);
    }
    static long double ldfact_even(std::uint64_t e) {
        std::uint64_t m = e / 2;
        return static_cast<long double>(m) * 0.6931471805599453094172321214581766L + lfact(m);
    }

    std::uint64_t entry(std::uint32_t r, std::uint32_t t) const {
        auto it = rows_[r].find(t);
        return it == rows_[r].end() ? 0 : it->second;
    }

    void sub_entry(std::uint32_t r, std::uint32_t t, std::uint64_t amount) {
        auto it = rows_[r].find(t);
        it->second -= amount;
        if (it->second == 0) rows_[r].erase(it);
    }

    long double pair_term(std::uint64_t n_r, std::uint64_t n_t, std::uint64_t count,
                          bool diagonal) const {
        if (count == 0) return 0.0L;
        if (cfg_.model == SbmModel::dc) return diagonal ? -ldfact_even(count) : -lfact(count);
        std::uint64_t capacity = diagonal ? n_r * (n_r - 1) / 2 : n_r * n_t;
        std::uint64_t edges = diagonal ? count / 2 : count;
        if (edges > capacity)
            throw domain_error("inference: infeasible block-pair edge count under NDC");
        return lbinom(capacity, edges);
    }

    /// B-dependent prior terms (block-count prior and edge count matrix).
    long double b_terms(std::size_t num_blocks) const {
        long double sum = cfg_.beta * lbinom(g_->num_nodes() - 1, num_blocks - 1);
        if (cfg_.edges_dl) {
            std::uint64_t slots = static_cast<std::uint64_t>(num_blocks) * (num_blocks + 1) / 2;
            sum += cfg_.beta * lbinom(slots + g_->num_edges() - 1, g_->num_edges());
        }
        return sum;
    }

    /// Sum of every DL term that involves block r or block s: the two
    /// blocks' vertex terms plus all nonzero cells of their rows. Terms not
    /// touching r or s are identical before and after a move or merge and
    /// cancel in deltas. B-dependent terms are added by the callers.
    long double local_terms(std::uint32_t r, std::uint32_t s) const {
        long double sum = 0.0L;
        const bool dc = cfg_.model == SbmModel::dc;
        const std::uint32_t slots[2] = {r, s};
        const int count_slots = (r == s) ? 1 : 2;
        for (int i = 0; i < count_slots; ++i) {
            std::uint32_t slot = slots[i];
            if (nsize_[slot] == 0) continue;
            sum -= cfg_.beta * lfact(nsize_[slot]);
            if (dc) {
                sum += lfact(dsum_[slot]);
                sum += cfg_.beta * lbinom(nsize_[slot] + dsum_[slot] - 1, dsum_[slot]);
            }
            for (auto [t, cell] : rows_[slot]) {
                if (i == 1 && t == r) continue; // cell (s,r) already counted as (r,s)
                sum += pair_term(nsize_[slot], nsize_[t], cell, t == slot);
            }
        }
        return sum;
    }

    const Graph* g_;
    DlConfig cfg_;
    std::vector<std::uint32_t> assign_;
    std::vector<std::uint64_t> nsize_;
    std::vector<std::uint64_t> dsum_;
    std::vector<std::unordered_map<std::uint32_t, std::uint64_t>> rows_;
    std::set<std::uint32_t> empty_slots_;
    std::size_t num_blocks_ = 0;
};

constexpr double kImproveEps = 1e-9;

/// One pass over all nodes in shuffled order, applying for each node the
/// best strictly improving relocation to a neighboring or empty block.
/// Equal deltas resolve to the lowest target block id. Moves into an empty
/// slot are offered only while the block count is below `max_blocks`.
inline bool sweep_once(const Graph& g, BlockState& state, std::size_t max_blocks,
                       std::mt19937_64& rng) {
    std::vector<NodeId> order(g.num_nodes());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::shuffle(order.begin(), order.end(), rng);
    bool improved = false;
    constexpr std::uint32_t invalid = std::numeric_limits<std::uint32_t>::max();
    for (NodeId v : order) {
        std::uint32_t r = state.block_of(v);
        auto candidates = state.neighbor_blocks(v);
        if (state.block_size(r) > 1 && state.num_blocks() < max_blocks) {
            if (auto slot = state.lowest_empty_slot()) {
                candidates.push_back(*slot);
                std::sort(candidates.begin(), candidates.end());
            }
        }
        double best_delta = -kImproveEps;
        std::uint32_t best = invalid;
        for (std::uint32_t target : candidates) {
            double delta = state.move_delta(v, target);
            if (delta < best_delta) {
                best_delta = delta;
                best = target;
            }
        }
        if (best != invalid) {
            state.apply_move(v, best);
            improved = true;
        }
    }
    return improved;
}

inline void run_sweeps(const Graph& g, BlockState& state, std::size_t limit,
                       std::size_t max_blocks, std::mt19937_64& rng) {
    for (std::size_t i = 0; i < limit; ++i)
        if (!sweep_once(g, state, max_blocks, rng)) break;
}

/// Uniform sample of k elements from a sorted candidate list (Floyd).
inline std::vector<std::uint32_t> sample_partners(const std::vector<std::uint32_t>& candidates,
                                                  std::size_t k, std::mt19937_64& rng) {
    if (candidates.size() <= k) return candidates;
    std::set<std::size_t> chosen;
    for (std::size_t i = candidates.size() - k; i < candidates.size(); ++i) {
        std::uniform_int_distribution<std::size_t> dist(0, i);
        std::size_t t = dist(rng);
        if (!chosen.insert(t).second) chosen.insert(i);
    }
    std::vector<std::uint32_t> out;
    out.reserve(k);
    for (std::size_t index : chosen) out.push_back(candidates[index]);
    return out;
}

struct DescentResult {
    Partition best;
    double best_dl = 0.0;
    std::vector<double> incumbents; // DL at each incumbent update, non-increasing
};

/// Agglomerative descent: starting from the given partition, repeatedly
/// applies the least-cost block merge (all pairs when B <= 64, sampled
/// adjacent pairs above) interleaved with move sweeps, all the way down to
/// B = 1, and returns the best partition encountered.
inline DescentResult agglomerative_descent(const Graph& g, const Partition& start,
                                           const DlConfig& cfg, std::size_t sweep_limit,
                                           std::size_t sample_width, std::mt19937_64& rng) {
    BlockState state(g, start, cfg);
    DescentResult result;
    result.best_dl = state.full_dl();
    result.best = state.to_partition();
    result.incumbents.push_back(result.best_dl);
    auto snapshot = [&] {
        double dl = state.full_dl();
        if (dl < result.best_dl) {
            result.best_dl = dl;
            result.best = state.to_partition();
            result.incumbents.push_back(dl);
        }
    };
    // During the descent, sweeps may not grow B past the current level, so
    // the loop strictly descends toward B = 1.
    run_sweeps(g, state, sweep_limit, state.num_blocks(), rng);
    snapshot();
    while (state.num_blocks() > 1) {
        auto nonempty = state.nonempty_blocks();
        double best_delta = std::numeric_limits<double>::infinity();
        std::pair<std::uint32_t, std::uint32_t> best_pair{0, 0};
        bool found = false;
        auto consider = [&](std::uint32_t a, std::uint32_t b) {
            if (a > b) std::swap(a, b);
            if (a == b) return;
            double delta = state.merge_delta(a, b);
            std::pair<std::uint32_t, std::uint32_t> pair{a, b};
            if (!found || delta < best_delta ||
                (delta == best_delta && pair < best_pair)) {
                found = true;
                best_delta = delta;
                best_pair = pair;
            }
        };
        if (nonempty.size() <= 64) {
            for (std::size_t i = 0; i < nonempty.size(); ++i)
                for (std::size_t j = i + 1; j < nonempty.size(); ++j)
                    consider(nonempty[i], nonempty[j]);
        } else {
            bool any_adjacent = false;
            for (std::uint32_t r : nonempty) {
                auto adjacent = state.adjacent_blocks(r);
                if (adjacent.empty()) continue;
                any_adjacent = true;
                for (std::uint32_t s : sample_partners(adjacent, sample_width, rng))
                    consider(r, s);
            }
            if (!any_adjacent) {
                // No edges between blocks at all; pair consecutive blocks so
                // the descent still reaches B = 1.
                for (std::size_t i = 0; i + 1 < nonempty.size(); ++i)
                    consider(nonempty[i], nonempty[i + 1]);
            }
        }
        state.apply_merge(best_pair.first, best_pair.second);
        run_sweeps(g, state, sweep_limit, state.num_blocks(), rng);
        snapshot();
    }
    return result;
}

inline SbmModel require_concrete_model(FitModel model, const char* op) {
    switch (model) {
        case FitModel::dc: return SbmModel::dc;
        case FitModel::ndc: return SbmModel::ndc;
        case FitModel::chosen:
            throw domain_error(std::string(op) + ": requires a concrete model (dc or ndc)");
    }
    throw domain_error("unreachable");
}

} // namespace detail

/// Moves single nodes to the neighboring-or-empty block giving the largest
/// DL decrease until no move improves or the sweep limit is reached.
inline Partition greedy_move_sweep(const Graph& g, const Partition& p,
                                   const InferenceConfig& cfg) {
    SbmModel model = detail::require_concrete_model(cfg.model, "greedy_move_sweep");
    detail::BlockState state(g, p, cfg.dl_config(model));
    std::mt19937_64 rng(detail::splitmix64(cfg.seed));
    // B is capped at N only, so sweeps here may grow the block count.
    detail::run_sweeps(g, state, cfg.move_sweep_limit, g.num_nodes(), rng);
    return state.to_partition();
}

/// Agglomerative B-descent from the given partition down to one block,
/// interleaving move sweeps; returns the best partition seen.
inline Partition agglomerate(const Graph& g, const Partition& p, const InferenceConfig& cfg) {
    SbmModel model = detail::require_concrete_model(cfg.model, "agglomerate");
    std::mt19937_64 rng(detail::splitmix64(cfg.seed));
    return detail::agglomerative_descent(g, p, cfg.dl_config(model), cfg.move_sweep_limit,
                                         cfg.merge_candidates_per_block, rng)
        .best;
}

/// Fits a flat SBM by description-length minimization over independent
/// restarts (each an agglomerative descent from all-singletons). For
/// model == chosen, fits DC and NDC independently and returns the fit with
/// the lower total; exact ties select DC and set chosen_tie.
inline FitResult fit(const Graph& g, const InferenceConfig& cfg) {
    if (g.num_nodes() == 0) throw domain_error("fit: graph must be nonempty");
    if (cfg.restarts < 1) throw domain_error("fit: restarts must be >= 1");

    struct ModelRun {
        Partition partition;
        double total = 0.0;
        std::vector<double> restart_totals;
        std::vector<std::vector<double>> incumbent_log;
    };
    auto run_model = [&](SbmModel model, std::uint64_t model_tag) {
        DlConfig dl_cfg = cfg.dl_config(model);
        std::vector<detail::DescentResult> descents(cfg.restarts);
        std::vector<double> totals(cfg.restarts);
        parallel_for(cfg.restarts, cfg.num_threads, [&](std::size_t i) {
            std::uint64_t restart_seed =
                detail::splitmix64(detail::splitmix64(cfg.seed + model_tag) + i);
            std::mt19937_64 rng(restart_seed);
            descents[i] = detail::agglomerative_descent(g, Partition::singletons(g.num_nodes()),
                                                        dl_cfg, cfg.move_sweep_limit,
                                                        cfg.merge_candidates_per_block, rng);
            totals[i] = compute_dl(g, descents[i].best, dl_cfg).total;
        });
        std::size_t best = 0;
        for (std::size_t i = 1; i < cfg.restarts; ++i)
            if (totals[i] < totals[best]) best = i;
        ModelRun run;
        run.partition = std::move(descents[best].best);
        run.total = totals[best];
        run.restart_totals = std::move(totals);
        for (auto& d : descents) run.incumbent_log.push_back(std::move(d.incumbents));
        return run;
    };

    constexpr std::uint64_t dc_tag = 0xD1, ndc_tag = 0xD2;
    FitResult result;
    if (cfg.model == FitModel::chosen) {
        ModelRun dc_run = run_model(SbmModel::dc, dc_tag);
        ModelRun ndc_run = run_model(SbmModel::ndc, ndc_tag);
        bool pick_dc = dc_run.total <= ndc_run.total;
        result.chosen_tie = dc_run.total == ndc_run.total;
        ModelRun& selected = pick_dc ? dc_run : ndc_run;
        result.model_selected = pick_dc ? SbmModel::dc : SbmModel::ndc;
        result.alternative_total = pick_dc ? ndc_run.total : dc_run.total;
        result.partition = std::move(selected.partition);
        result.restart_totals = std::move(selected.restart_totals);
        result.incumbent_log = std::move(selected.incumbent_log);
    } else {
        SbmModel model = cfg.model == FitModel::dc ? SbmModel::dc : SbmModel::ndc;
        ModelRun run = run_model(model, model == SbmModel::dc ? dc_tag : ndc_tag);
        result.model_selected = model;
        result.partition = std::move(run.partition);
        result.restart_totals = std::move(run.restart_totals);
        result.incumbent_log = std::move(run.incumbent_log);
    }
    result.report = compute_dl(g, result.partition, cfg.dl_config(result.model_selected));
    return result;
}

} // namespace blockcut
