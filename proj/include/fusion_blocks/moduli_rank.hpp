#pragma once
// Ranks of conformal-block bundles on stable pointed curves: the closed
// matrix formula, the factorization sum over a dual graph, and enumeration
// of trivalent dual graphs for cross-validation.

#include "fusion_blocks/fusion_ring.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace fb::moduli {

using fusion::FusionData;
using fusion::IntMatrix;

class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// 2g - 2 + n <= 0 with vacuum insertion disabled.
class UnstableError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class EnumerationBoundError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Worker count from FUSION_BLOCKS_THREADS, else the hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("FUSION_BLOCKS_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && n >= 1) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct Leg {
    int vertex = 0;
    int label = 0;
    friend bool operator==(const Leg&, const Leg&) = default;
};

/// Combinatorial type of a stable pointed curve.  An edge's first endpoint
/// sees the edge label, the second its dual.
struct DualGraph {
    std::vector<int> genus;
    std::vector<std::pair<int, int>> edges;
    std::vector<Leg> legs;

    int vertex_count() const { return static_cast<int>(genus.size()); }
    int arithmetic_genus() const {
        return std::accumulate(genus.begin(), genus.end(), 0) + static_cast<int>(edges.size()) - vertex_count() + 1;
    }
    /// Edge endpoints plus legs at v (a self-loop counts twice).
    int valence(int v) const {
        int n = 0;
        for (const auto& [a, b] : edges) n += (a == v) + (b == v);
        for (const auto& l : legs) n += l.vertex == v;
        return n;
    }
    bool stable_vertex(int v) const { return 2 * genus[v] - 2 + valence(v) > 0; }
    bool trivalent_vertex(int v) const { return genus[v] == 0 && valence(v) == 3; }
};

/// Throws GraphError on bad indices, negative genus, instability or disconnection.
inline void validate(const DualGraph& g, size_t label_count) {
    const int V = g.vertex_count();
    if (V == 0) throw GraphError("dual graph: no vertices");
    for (int v = 0; v < V; ++v)
        if (g.genus[v] < 0) throw GraphError("dual graph: vertex " + std::to_string(v) + " has negative genus");
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const auto [a, b] = g.edges[e];
        if (a < 0 || a >= V || b < 0 || b >= V)
            throw GraphError("dual graph: edge " + std::to_string(e) + " has an endpoint out of range");
    }
    for (size_t l = 0; l < g.legs.size(); ++l) {
        if (g.legs[l].vertex < 0 || g.legs[l].vertex >= V)
            throw GraphError("dual graph: leg " + std::to_string(l) + " attached to a missing vertex");
        if (g.legs[l].label < 0 || static_cast<size_t>(g.legs[l].label) >= label_count)
            throw GraphError("dual graph: leg " + std::to_string(l) + " has a label out of range");
    }
    for (int v = 0; v < V; ++v)
        if (!g.stable_vertex(v)) throw GraphError("dual graph: vertex " + std::to_string(v) + " is unstable");
    std::vector<int> parent(V);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& [a, b] : g.edges) parent[find(a)] = find(b);
    for (int v = 1; v < V; ++v)
        if (find(v) != find(0)) throw GraphError("dual graph: not connected");
}

struct RankQuery {
    int genus = 0;
    std::vector<int> legs;
    bool allow_vacuum_insertion = true;
};

/// Rank computations over one verified ring; immutable after construction
/// apart from internal caches, and safe to share between threads.
class RankEngine {
public:
    explicit RankEngine(FusionData ring) : ring_(std::move(ring)) {
        if (auto v = fusion::verify_axioms(ring_); !v.empty())
            throw fusion::AxiomError("rank: ring violates " + v.front().str());
        for (size_t i = 0; i < ring_.size(); ++i) n_.push_back(fusion::fusion_matrix(ring_, static_cast<int>(i)));
        w_ = fusion::average_matrix(ring_);
        w_pow_.push_back(IntMatrix::identity(ring_.size()));
    }

    const FusionData& ring() const { return ring_; }
    const IntMatrix& average() const { return w_; }

    /// N_{i,j}^{k+}: three incoming legs.
    const Integer& three_point(int i, int j, int k) const { return ring_.N(i, j, ring_.dual(k)); }

    /// (N_{i_1} ... N_{i_n} W^g)_0^0 after vacuum insertion; for g >= 2 also
    /// checks Tr(N_{i.} W^{g-1}).
    Integer closed_form(const RankQuery& q) const {
        if (q.genus < 0) throw std::invalid_argument("rank: genus must be nonnegative");
        for (int l : q.legs) ring_.check(l);
        std::vector<int> legs = q.legs;
        if (2 * q.genus - 2 + static_cast<int>(legs.size()) <= 0) {
            if (!q.allow_vacuum_insertion)
                throw UnstableError("rank: unstable query (genus " + std::to_string(q.genus) + ", " +
                                    std::to_string(legs.size()) + " legs) and vacuum insertion disabled");
            while (2 * q.genus - 2 + static_cast<int>(legs.size()) <= 0) legs.push_back(0);
        }
        const size_t r = ring_.size();
        std::vector<Integer> row(r, Integer(0)), next(r);
        row[0] = 1;
        auto apply = [&](const IntMatrix& m) {
            for (size_t k = 0; k < r; ++k) {
                next[k] = 0;
                for (size_t j = 0; j < r; ++j)
                    if (row[j] != 0 && m(j, k) != 0) next[k] += row[j] * m(j, k);
            }
            row.swap(next);
        };
        for (int l : legs) apply(n_[l]);
        for (int g = 0; g < q.genus; ++g) apply(w_);
        if (q.genus >= 2) {
            const Integer t = trace_form(q.genus, legs);
            if (t != row[0])
                throw std::logic_error("rank formula mismatch: (N W^g)_00 = " + row[0].get_str() + " but Tr(N W^(g-1)) = " +
                                       t.get_str());
        }
        return row[0];
    }

    Integer closed_form(int genus, const std::vector<int>& legs) const { return closed_form(RankQuery{genus, legs, true}); }

    /// Tr(N_{i_1} ... N_{i_n} W^{g-1}), g >= 1.
    Integer trace_form(int genus, const std::vector<int>& legs) const {
        if (genus < 1) throw std::invalid_argument("trace_form: genus must be >= 1");
        IntMatrix m = IntMatrix::identity(ring_.size());
        for (int l : legs) m = m * n_.at(ring_.check(l));
        const IntMatrix& wp = w_power(static_cast<unsigned>(genus - 1));
        Integer t = 0;
        const size_t r = ring_.size();
        for (size_t j = 0; j < r; ++j)
            for (size_t k = 0; k < r; ++k)
                if (m(j, k) != 0 && wp(k, j) != 0) t += m(j, k) * wp(k, j);
        return t;
    }

    /// Factorization sum over edge labelings of the product of vertex ranks.
    Integer dual_graph(const DualGraph& g, unsigned threads = 0) const {
        validate(g, ring_.size());
        Walk walk(*this, g);
        return walk.run(threads ? threads : worker_count());
    }

private:
    const IntMatrix& w_power(unsigned e) const {
        std::lock_guard lock(mu_);
        while (w_pow_.size() <= e) w_pow_.push_back(w_pow_.back() * w_);
        return w_pow_[e];
    }

    // Depth-first walk over edge labels with early exit on zero vertex factors.
    class Walk {
    public:
        Walk(const RankEngine& eng, const DualGraph& g) : eng_(eng), g_(g) {
            const int V = g.vertex_count();
            const size_t E = g.edges.size();
            base_labels_.resize(V);
            for (const auto& l : g.legs) base_labels_[l.vertex].push_back(l.label);
            // Greedy order: next edge touches the vertex with fewest unassigned edges.
            std::vector<int> remaining(V, 0);
            for (const auto& [a, b] : g.edges) ++remaining[a], ++remaining[b];
            if (E > 0) {
                std::vector<bool> used(E);
                for (size_t step = 0; step < E; ++step) {
                    size_t best = E;
                    int best_key = 0;
                    for (size_t e = 0; e < E; ++e) {
                        if (used[e]) continue;
                        const auto [a, b] = g.edges[e];
                        const int key = a == b ? remaining[a] - 1 : std::min(remaining[a], remaining[b]);
                        if (best == E || key < best_key) best = e, best_key = key;
                    }
                    used[best] = true;
                    order_.push_back(best);
                    const auto [a, b] = g.edges[best];
                    --remaining[a], --remaining[b];
                }
            }
            completes_.resize(E);
            std::vector<int> last(V, -1);
            for (size_t p = 0; p < E; ++p) {
                const auto [a, b] = g.edges[order_[p]];
                last[a] = last[b] = static_cast<int>(p);
            }
            for (int v = 0; v < V; ++v) {
                if (last[v] < 0) isolated_.push_back(v);
                else completes_[last[v]].push_back(v);
            }
        }

        Integer run(unsigned threads) const {
            const int r = static_cast<int>(eng_.ring_.size());
            State base = fresh();
            Integer pre = 1;
            for (int v : isolated_) {
                pre *= vertex_rank(base, v);
                if (pre == 0) return 0;
            }
            if (order_.empty()) return pre;
            threads = std::min<unsigned>(threads, static_cast<unsigned>(r));
            std::vector<Integer> partial(r, Integer(0));
            auto work = [&](int t) {
                State s = fresh();
                for (int a = t; a < r; a += static_cast<int>(threads)) partial[a] = descend(s, 0, a, pre);
            };
            if (threads <= 1) work(0);
            else {
                std::vector<std::thread> pool;
                for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, static_cast<int>(t));
                for (auto& th : pool) th.join();
            }
            Integer total = 0;
            for (const auto& p : partial) total += p;
            return total;
        }

    private:
        struct State {
            std::vector<std::vector<int>> labels;
            std::map<std::pair<int, std::vector<int>>, Integer> memo;
        };

        State fresh() const { return State{base_labels_, {}}; }

        Integer vertex_rank(State& s, int v) const {
            const auto& ls = s.labels[v];
            if (g_.genus[v] == 0 && ls.size() == 3) return eng_.three_point(ls[0], ls[1], ls[2]);
            std::vector<int> key = ls;
            std::sort(key.begin(), key.end());
            auto k = std::make_pair(g_.genus[v], std::move(key));
            auto it = s.memo.find(k);
            if (it != s.memo.end()) return it->second;
            Integer r = eng_.closed_form(g_.genus[v], ls);
            s.memo.emplace(std::move(k), r);
            return r;
        }

        // Sum over labelings of edges order_[p..] with order_[p] labelled `a`.
        Integer descend(State& s, size_t p, int a, const Integer& acc) const {
            const auto [u, w] = g_.edges[order_[p]];
            s.labels[u].push_back(a);
            s.labels[w].push_back(eng_.ring_.dual(a));
            Integer prod = acc;
            for (int v : completes_[p]) {
                prod *= vertex_rank(s, v);
                if (prod == 0) break;
            }
            Integer total = 0;
            if (prod != 0) {
                if (p + 1 == order_.size()) total = prod;
                else
                    for (int b = 0; b < static_cast<int>(eng_.ring_.size()); ++b) total += descend(s, p + 1, b, prod);
            }
            s.labels[w].pop_back();
            s.labels[u].pop_back();
            return total;
        }

        const RankEngine& eng_;
        const DualGraph& g_;
        std::vector<std::vector<int>> base_labels_;
        std::vector<size_t> order_;
        std::vector<std::vector<int>> completes_;
        std::vector<int> isolated_;
    };

    FusionData ring_;
    std::vector<IntMatrix> n_;
    IntMatrix w_;
    mutable std::mutex mu_;
    mutable std::vector<IntMatrix> w_pow_;
};

inline Integer three_point_rank(const FusionData& ring, int i, int j, int k) { return ring.N(i, j, ring.dual(k)); }

inline Integer rank_closed_form(const FusionData& ring, const RankQuery& q) { return RankEngine(ring).closed_form(q); }

inline Integer rank_dual_graph(const FusionData& ring, const DualGraph& g) { return RankEngine(ring).dual_graph(g); }

// ---------------------------------------------------------------------------
// Trivalent graph enumeration.  Legs carry distinct ids 0..n-1 in `label`.

namespace detail {

/// Lexicographically least encoding over vertex orders compatible with a
/// colour refinement; equal codes iff isomorphic (leg ids preserved).
inline std::vector<int> canonical_code(const DualGraph& g) {
    const int V = g.vertex_count();
    std::vector<std::vector<int>> adj(V, std::vector<int>(V, 0));
    for (const auto& [a, b] : g.edges) {
        ++adj[a][b];
        if (a != b) ++adj[b][a];
    }
    std::vector<std::vector<int>> legs(V);
    for (const auto& l : g.legs) legs[l.vertex].push_back(l.label);
    for (auto& l : legs) std::sort(l.begin(), l.end());

    std::vector<int> color(V);
    {
        std::vector<std::vector<int>> sig(V);
        for (int v = 0; v < V; ++v) {
            sig[v] = {g.genus[v], adj[v][v], g.valence(v), static_cast<int>(legs[v].size())};
            sig[v].insert(sig[v].end(), legs[v].begin(), legs[v].end());
        }
        auto sorted = sig;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (int v = 0; v < V; ++v) color[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sig[v]) - sorted.begin());
    }
    for (int round = 0; round < V; ++round) {
        std::vector<std::vector<int>> sig(V);
        for (int v = 0; v < V; ++v) {
            std::vector<std::pair<int, int>> nb;
            for (int w = 0; w < V; ++w)
                if (w != v && adj[v][w]) nb.emplace_back(color[w], adj[v][w]);
            std::sort(nb.begin(), nb.end());
            sig[v] = {color[v]};
            for (const auto& [c, m] : nb) sig[v].push_back(c), sig[v].push_back(m);
        }
        auto sorted = sig;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        std::vector<int> next(V);
        for (int v = 0; v < V; ++v) next[v] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), sig[v]) - sorted.begin());
        const bool stable = std::set<int>(next.begin(), next.end()).size() == std::set<int>(color.begin(), color.end()).size();
        color = next;
        if (stable) break;
    }
    std::vector<int> perm(V);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](int a, int b) { return color[a] < color[b]; });
    auto encode = [&](const std::vector<int>& p) {
        std::vector<int> code{V};
        for (int i = 0; i < V; ++i) {
            code.push_back(g.genus[p[i]]);
            code.push_back(static_cast<int>(legs[p[i]].size()));
            code.insert(code.end(), legs[p[i]].begin(), legs[p[i]].end());
        }
        for (int i = 0; i < V; ++i)
            for (int j = i; j < V; ++j) code.push_back(adj[p[i]][p[j]]);
        return code;
    };
    std::vector<int> best = encode(perm);
    // permute within colour classes
    std::vector<std::pair<int, int>> blocks;
    for (int i = 0; i < V;) {
        int j = i;
        while (j < V && color[perm[j]] == color[perm[i]]) ++j;
        if (j - i > 1) blocks.emplace_back(i, j);
        i = j;
    }
    std::function<void(size_t)> rec = [&](size_t bi) {
        if (bi == blocks.size()) {
            best = std::min(best, encode(perm));
            return;
        }
        auto [lo, hi] = blocks[bi];
        std::sort(perm.begin() + lo, perm.begin() + hi);
        do rec(bi + 1);
        while (std::next_permutation(perm.begin() + lo, perm.begin() + hi));
    };
    if (!blocks.empty()) rec(0);
    return best;
}

/// One-edge degenerations of vertex v.
inline std::vector<DualGraph> degenerate(const DualGraph& g, int v) {
    std::vector<DualGraph> out;
    if (g.genus[v] >= 1) {
        DualGraph h = g;
        --h.genus[v];
        h.edges.emplace_back(v, v);
        out.push_back(std::move(h));
    }
    // half-edges at v: (kind, index, side) with kind 0 = leg, 1 = edge endpoint
    struct Half {
        int kind, index, side;
    };
    std::vector<Half> hs;
    for (size_t l = 0; l < g.legs.size(); ++l)
        if (g.legs[l].vertex == v) hs.push_back({0, static_cast<int>(l), 0});
    for (size_t e = 0; e < g.edges.size(); ++e) {
        if (g.edges[e].first == v) hs.push_back({1, static_cast<int>(e), 0});
        if (g.edges[e].second == v) hs.push_back({1, static_cast<int>(e), 1});
    }
    const int H = static_cast<int>(hs.size());
    const int w = g.vertex_count();
    for (int g1 = 0; g1 <= g.genus[v]; ++g1) {
        const int g2 = g.genus[v] - g1;
        for (unsigned mask = 0; mask < (1u << H); ++mask) {
            const int n2 = std::popcount(mask), n1 = H - n2;
            if (2 * g1 - 2 + n1 + 1 <= 0 || 2 * g2 - 2 + n2 + 1 <= 0) continue;
            DualGraph h = g;
            h.genus[v] = g1;
            h.genus.push_back(g2);
            for (int i = 0; i < H; ++i) {
                if (!(mask >> i & 1)) continue;
                const Half& x = hs[i];
                if (x.kind == 0) h.legs[x.index].vertex = w;
                else if (x.side == 0) h.edges[x.index].first = w;
                else h.edges[x.index].second = w;
            }
            h.edges.emplace_back(v, w);
            out.push_back(std::move(h));
        }
    }
    return out;
}

} // namespace detail

namespace detail {

/// Breadth-first degeneration from the one-vertex graph, one non-trivalent
/// vertex at a time, deduplicated by canonical code.  Unbounded.
inline std::vector<DualGraph> enumerate_trivalent(int g, int n) {
    DualGraph start{{g}, {}, {}};
    for (int i = 0; i < n; ++i) start.legs.push_back({0, i});
    std::map<std::vector<int>, DualGraph> frontier{{canonical_code(start), start}}, done;
    while (!frontier.empty()) {
        std::map<std::vector<int>, DualGraph> next;
        for (const auto& [code, graph] : frontier) {
            int v = 0;
            while (v < graph.vertex_count() && graph.trivalent_vertex(v)) ++v;
            if (v == graph.vertex_count()) {
                done.emplace(code, graph);
                continue;
            }
            for (auto& h : degenerate(graph, v)) {
                auto c = canonical_code(h);
                next.emplace(std::move(c), std::move(h));
            }
        }
        frontier.swap(next);
    }
    std::vector<DualGraph> out;
    for (auto& [c, graph] : done) out.push_back(std::move(graph));
    return out;
}

} // namespace detail

/// All trivalent stable dual graphs of genus g with n legs (leg i carries
/// label i), up to isomorphism.  Bounded by g <= 3, n <= 4.
inline std::vector<DualGraph> trivalent_graphs(int g, int n) {
    if (g < 0 || n < 0) throw std::invalid_argument("trivalent_graphs: genus and leg count must be nonnegative");
    if (g > 3 || n > 4) throw EnumerationBoundError("trivalent graph enumeration is bounded by genus 3 and 4 legs");
    if (2 * g - 2 + n <= 0) throw UnstableError("trivalent_graphs: (g, n) is unstable");
    return detail::enumerate_trivalent(g, n);
}

/// Copy of a leg-id graph with leg i relabelled to labels[i].
inline DualGraph with_labels(DualGraph g, const std::vector<int>& labels) {
    for (auto& l : g.legs) l.label = labels.at(static_cast<size_t>(l.label));
    return g;
}

struct DecompositionReport {
    int genus = 0;
    std::vector<int> legs;
    size_t graphs = 0;
    Integer closed_form = 0;
    std::vector<Integer> values;  // one per graph, in enumeration order
    std::optional<size_t> first_discrepancy;
    bool consistent() const { return !first_discrepancy.has_value(); }
};

/// Evaluates rank_dual_graph on every trivalent degeneration and compares
/// with the closed form.
inline DecompositionReport decomposition_invariance(const RankEngine& eng, int g, const std::vector<int>& legs) {
    for (int l : legs) eng.ring().check(l);
    DecompositionReport rep{g, legs};
    const auto graphs = trivalent_graphs(g, static_cast<int>(legs.size()));
    rep.graphs = graphs.size();
    rep.closed_form = eng.closed_form(g, legs);
    for (size_t i = 0; i < graphs.size(); ++i) {
        rep.values.push_back(eng.dual_graph(with_labels(graphs[i], legs)));
        if (!rep.first_discrepancy && rep.values.back() != rep.closed_form) rep.first_discrepancy = i;
    }
    return rep;
}

inline DecompositionReport decomposition_invariance(const FusionData& ring, int g, const std::vector<int>& legs) {
    return decomposition_invariance(RankEngine(ring), g, legs);
}

// JSON: {"vertices":[{"genus":g}], "edges":[[u,v]], "legs":[{"vertex":u,"label":"name"}]}
inline nlohmann::json to_json(const DualGraph& g, const FusionData& ring) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (int x : g.genus) j["vertices"].push_back({{"genus", x}});
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : g.edges) j["edges"].push_back({a, b});
    j["legs"] = nlohmann::json::array();
    for (const auto& l : g.legs) j["legs"].push_back({{"vertex", l.vertex}, {"label", ring.labels().at(ring.check(l.label))}});
    return j;
}

inline DualGraph graph_from_json(const nlohmann::json& j, const FusionData& ring) {
    auto need = [](const nlohmann::json& o, const char* key, const std::string& where) -> const nlohmann::json& {
        if (!o.is_object() || !o.contains(key)) throw GraphError("dual graph: missing field '" + where + key + "'");
        return o.at(key);
    };
    DualGraph g;
    const auto& vs = need(j, "vertices", "");
    if (!vs.is_array()) throw GraphError("dual graph: field 'vertices' must be an array");
    for (size_t i = 0; i < vs.size(); ++i) {
        const auto& x = need(vs[i], "genus", "vertices[" + std::to_string(i) + "].");
        if (!x.is_number_integer()) throw GraphError("dual graph: vertices[" + std::to_string(i) + "].genus is not an integer");
        g.genus.push_back(x.get<int>());
    }
    if (j.contains("edges")) {
        const auto& es = j.at("edges");
        if (!es.is_array()) throw GraphError("dual graph: field 'edges' must be an array");
        for (size_t i = 0; i < es.size(); ++i) {
            const auto& e = es[i];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
                throw GraphError("dual graph: edges[" + std::to_string(i) + "] must be a pair of vertex indices");
            g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
    }
    if (j.contains("legs")) {
        const auto& ls = j.at("legs");
        if (!ls.is_array()) throw GraphError("dual graph: field 'legs' must be an array");
        for (size_t i = 0; i < ls.size(); ++i) {
            const std::string where = "legs[" + std::to_string(i) + "].";
            const auto& v = need(ls[i], "vertex", where);
            const auto& l = need(ls[i], "label", where);
            if (!v.is_number_integer()) throw GraphError("dual graph: " + where + "vertex is not an integer");
            if (!l.is_string()) throw GraphError("dual graph: " + where + "label is not a string");
            g.legs.push_back({v.get<int>(), ring.index_of(l.get<std::string>())});
        }
    }
    validate(g, ring.size());
    return g;
}

} // namespace fb::moduli
