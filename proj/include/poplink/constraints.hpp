#pragma once

#include "poplink/certificate_graph.hpp"
#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/match_set.hpp"
#include "poplink/record_store.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

namespace poplink {

enum class AssignmentMode : std::uint8_t { Greedy, Optimal };

inline std::string_view to_string(AssignmentMode m) { return m == AssignmentMode::Greedy ? "greedy" : "optimal"; }

inline AssignmentMode parse_assignment_mode(std::string_view s) {
	if (s == "greedy") {
		return AssignmentMode::Greedy;
	}
	if (s == "optimal") {
		return AssignmentMode::Optimal;
	}
	throw ConfigError("unknown assignment mode '" + std::string(s) + "'");
}

/// A scored left/right pair for assignment. Input order is the tie-break
/// order, so callers pass pairs sorted by certificate id.
struct Assignment {
	std::uint32_t left = 0;
	std::uint32_t right = 0;
	double weight = 0.0;
};

/// Indices of the pairs a greedy one-to-one pass accepts: highest weight
/// first, ties in input order, skipping pairs with a used endpoint.
inline std::vector<std::size_t> greedy_matching(const std::vector<Assignment> &pairs) {
	std::vector<std::size_t> order(pairs.size());
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::stable_sort(order.begin(), order.end(),
	                 [&](std::size_t x, std::size_t y) { return pairs[x].weight > pairs[y].weight; });
	std::unordered_map<std::uint32_t, bool> left_used;
	std::unordered_map<std::uint32_t, bool> right_used;
	std::vector<std::size_t> chosen;
	for (auto i : order) {
		if (left_used[pairs[i].left] || right_used[pairs[i].right]) {
			continue;
		}
		left_used[pairs[i].left] = right_used[pairs[i].right] = true;
		chosen.push_back(i);
	}
	std::sort(chosen.begin(), chosen.end());
	return chosen;
}

namespace constraints_detail {

/// Maximum-weight bipartite matching on one component by successive
/// shortest paths (Dijkstra with potentials). Pairs with weight <= 0 never
/// help and are ignored.
inline std::vector<std::size_t> solve_component(const std::vector<Assignment> &pairs,
                                                const std::vector<std::size_t> &members) {
	std::map<std::uint32_t, int> lid;
	std::map<std::uint32_t, int> rid;
	for (auto i : members) {
		lid.emplace(pairs[i].left, 0);
		rid.emplace(pairs[i].right, 0);
	}
	int n = 0;
	const int source = n++;
	for (auto &[k, v] : lid) {
		v = n++;
	}
	for (auto &[k, v] : rid) {
		v = n++;
	}
	const int sink = n++;

	struct Arc {
		int to;
		int cap;
		double cost;
		std::size_t pair; // SIZE_MAX for source/sink arcs
	};
	std::vector<Arc> arcs;
	std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
	auto add = [&](int u, int v, double cost, std::size_t pair) {
		out[u].push_back(static_cast<int>(arcs.size()));
		arcs.push_back({v, 1, cost, pair});
		out[v].push_back(static_cast<int>(arcs.size()));
		arcs.push_back({u, 0, -cost, pair});
	};
	for (auto &[k, v] : lid) {
		add(source, v, 0.0, SIZE_MAX);
	}
	for (auto i : members) {
		if (pairs[i].weight > 0.0) {
			add(lid[pairs[i].left], rid[pairs[i].right], -pairs[i].weight, i);
		}
	}
	for (auto &[k, v] : rid) {
		add(v, sink, 0.0, SIZE_MAX);
	}

	constexpr double inf = std::numeric_limits<double>::infinity();
	std::vector<double> pot(static_cast<std::size_t>(n), 0.0);
	for (auto &[k, v] : rid) {
		for (int a : out[v]) {
			if (arcs[a].cap == 0 && arcs[a ^ 1].cap == 1) { // reverse of an incoming pair arc
				pot[v] = std::min(pot[v], arcs[a ^ 1].cost);
			}
		}
		pot[sink] = std::min(pot[sink], pot[v]);
	}

	std::vector<double> dist(static_cast<std::size_t>(n));
	std::vector<int> via(static_cast<std::size_t>(n));
	for (;;) {
		std::fill(dist.begin(), dist.end(), inf);
		std::fill(via.begin(), via.end(), -1);
		using Item = std::pair<double, int>;
		std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
		dist[source] = 0.0;
		pq.push({0.0, source});
		while (!pq.empty()) {
			auto [d, u] = pq.top();
			pq.pop();
			if (d > dist[u]) {
				continue;
			}
			for (int a : out[u]) {
				const auto &arc = arcs[a];
				if (arc.cap == 0) {
					continue;
				}
				double nd = d + std::max(0.0, arc.cost + pot[u] - pot[arc.to]);
				if (nd < dist[arc.to]) {
					dist[arc.to] = nd;
					via[arc.to] = a;
					pq.push({nd, arc.to});
				}
			}
		}
		if (dist[sink] == inf) {
			break;
		}
		double real_cost = dist[sink] + pot[sink] - pot[source];
		if (real_cost >= -1e-12) {
			break;
		}
		for (int v = 0; v < n; ++v) {
			if (dist[v] < inf) {
				pot[v] += dist[v];
			}
		}
		for (int v = sink; v != source;) {
			int a = via[v];
			arcs[a].cap -= 1;
			arcs[a ^ 1].cap += 1;
			v = arcs[a ^ 1].to;
		}
	}
	std::vector<std::size_t> chosen;
	for (std::size_t a = 0; a < arcs.size(); a += 2) {
		if (arcs[a].pair != SIZE_MAX && arcs[a].cap == 0 && arcs[a].cost < 0.0) {
			// left->right arc saturated: the pair is in the matching
			int from = arcs[a + 1].to;
			if (from != source && arcs[a].to != sink) {
				chosen.push_back(arcs[a].pair);
			}
		}
	}
	return chosen;
}

} // namespace constraints_detail

/// Exact maximum-weight one-to-one assignment. Unmatched vertices are
/// allowed, so weak pairs are never forced in. Connected components are
/// solved independently.
inline std::vector<std::size_t> optimal_matching(const std::vector<Assignment> &pairs) {
	// union-find over left and right vertices
	std::unordered_map<std::uint64_t, std::size_t> node;
	auto node_of = [&](bool right, std::uint32_t id) {
		std::uint64_t key = (static_cast<std::uint64_t>(right) << 32) | id;
		return node.emplace(key, node.size()).first->second;
	};
	std::vector<std::size_t> parent;
	std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
		while (parent[x] != x) {
			parent[x] = parent[parent[x]];
			x = parent[x];
		}
		return x;
	};
	std::vector<std::pair<std::size_t, std::size_t>> ends;
	for (const auto &p : pairs) {
		auto l = node_of(false, p.left);
		auto r = node_of(true, p.right);
		while (parent.size() < node.size()) {
			parent.push_back(parent.size());
		}
		ends.emplace_back(l, r);
		parent[find(l)] = find(r);
	}
	std::map<std::size_t, std::vector<std::size_t>> components;
	for (std::size_t i = 0; i < pairs.size(); ++i) {
		components[find(ends[i].first)].push_back(i);
	}
	std::vector<std::size_t> chosen;
	for (const auto &[root, members] : components) {
		if (members.size() == 1) {
			if (pairs[members[0]].weight > 0.0) {
				chosen.push_back(members[0]);
			}
			continue;
		}
		auto part = constraints_detail::solve_component(pairs, members);
		chosen.insert(chosen.end(), part.begin(), part.end());
	}
	std::sort(chosen.begin(), chosen.end());
	return chosen;
}

/// Keep, for every `group` value, only its best pair (highest weight, ties
/// in input order).
inline std::vector<std::size_t> best_per(const std::vector<Assignment> &pairs, bool group_by_right) {
	std::map<std::uint32_t, std::size_t> best;
	for (std::size_t i = 0; i < pairs.size(); ++i) {
		auto key = group_by_right ? pairs[i].right : pairs[i].left;
		auto [it, inserted] = best.try_emplace(key, i);
		if (!inserted && pairs[i].weight > pairs[it->second].weight) {
			it->second = i;
		}
	}
	std::vector<std::size_t> chosen;
	for (const auto &[k, i] : best) {
		chosen.push_back(i);
	}
	std::sort(chosen.begin(), chosen.end());
	return chosen;
}

/// Apply the cardinality rule of each linkage type to a scored match set.
/// OneToMany lets a left certificate keep many partners while every right
/// certificate keeps only its best left; ManyToOne is the mirror image.
inline CertificateMatchSet enforce(const CertificateMatchSet &matches, const RecordStore &store,
                                   const std::vector<LinkageType> &types, const LinkConstraintTable &rules,
                                   AssignmentMode mode) {
	for (const auto &[name, c] : rules.entries()) {
		bool known = std::any_of(types.begin(), types.end(), [&](const LinkageType &t) { return t.name == name; });
		if (!known) {
			throw ConfigError("link constraint for unknown linkage type '" + name + "'");
		}
	}
	std::map<std::uint16_t, std::vector<std::size_t>> per_type;
	for (std::size_t i = 0; i < matches.entries.size(); ++i) {
		per_type[matches.entries[i].linkage_type].push_back(i);
	}
	std::vector<char> keep(matches.entries.size(), 0);
	for (const auto &[lt, idx] : per_type) {
		const auto &type = types.at(lt);
		auto card = rules.get(type.name);
		if (card == Cardinality::ManyToMany) {
			for (auto i : idx) {
				keep[i] = 1;
			}
			continue;
		}
		std::vector<Assignment> pairs;
		pairs.reserve(idx.size());
		for (auto i : idx) {
			const auto &e = matches.entries[i];
			auto o = orient(store, type, e.c1, e.c2);
			if (!o) {
				throw IntegrityError("match does not fit linkage type '" + type.name + "'");
			}
			pairs.push_back({o->first, o->second, e.score});
		}
		std::vector<std::size_t> chosen;
		switch (card) {
		case Cardinality::OneToOne:
			chosen = mode == AssignmentMode::Greedy ? greedy_matching(pairs) : optimal_matching(pairs);
			break;
		case Cardinality::OneToMany:
			chosen = best_per(pairs, true);
			break;
		case Cardinality::ManyToOne:
			chosen = best_per(pairs, false);
			break;
		case Cardinality::ManyToMany:
			break;
		}
		for (auto c : chosen) {
			keep[idx[c]] = 1;
		}
	}
	CertificateMatchSet out;
	out.method = matches.method;
	for (std::size_t i = 0; i < matches.entries.size(); ++i) {
		if (keep[i]) {
			out.entries.push_back(matches.entries[i]);
		}
	}
	return out;
}

} // namespace poplink
