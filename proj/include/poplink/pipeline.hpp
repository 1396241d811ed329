#pragma once

#include "poplink/blocking.hpp"
#include "poplink/certificate_graph.hpp"
#include "poplink/config.hpp"
#include "poplink/constraints.hpp"
#include "poplink/errors.hpp"
#include "poplink/evaluation.hpp"
#include "poplink/fusion.hpp"
#include "poplink/group.hpp"
#include "poplink/ingest.hpp"
#include "poplink/io.hpp"
#include "poplink/match_set.hpp"
#include "poplink/pairwise.hpp"
#include "poplink/relational.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace poplink {

inline const std::vector<std::string> &pipeline_stages() {
	static const std::vector<std::string> s = {"ingest", "pairwise", "relational", "group", "fusion", "segments"};
	return s;
}

inline void check_stage(const std::string &s) {
	for (const auto &x : pipeline_stages()) {
		if (x == s) {
			return;
		}
	}
	throw ConfigError("unknown stage '" + s + "'");
}

/// Gold links for training or evaluation: the gold file when configured,
/// else pairs implied by entity ids on the records.
inline std::optional<GoldLinkSet> load_gold(const PipelineConfig &cfg, const RecordStore &store,
                                            const std::optional<std::filesystem::path> &override_path = std::nullopt) {
	if (override_path) {
		if (!std::filesystem::exists(*override_path)) {
			throw ConfigError("gold file not found: " + override_path->string());
		}
		return read_gold(*override_path, store);
	}
	if (cfg.gold) {
		if (!std::filesystem::exists(*cfg.gold)) {
			throw ConfigError("gold file not found: " + cfg.gold->string());
		}
		return read_gold(*cfg.gold, store);
	}
	for (RecordIndex r = 0; r < store.record_count(); ++r) {
		if (store.record(r).entity_id) {
			return gold_from_entities(store, cfg.categories);
		}
	}
	return std::nullopt;
}

/// Scorer with trained weights when the config asks for them.
inline RecordScorer effective_scorer(const PipelineConfig &cfg, const RecordStore &store) {
	RecordScorer scorer = cfg.scorer;
	if (cfg.weighting == WeightingMode::Trained) {
		auto gold = load_gold(cfg, store);
		if (!gold) {
			throw ConfigError("trained weighting needs a gold file or entity ids");
		}
		scorer.weights = train_weights(store, gold->list(), scorer.comparators, cfg.role_pairs, cfg.train_sample_size,
		                               cfg.seed);
	}
	return scorer;
}

/// Blocking plus individual scoring.
inline LinkSet link_individuals(const PipelineConfig &cfg, const RecordStore &store, std::size_t workers,
                                BlockingStats *stats = nullptr,
                                const std::function<void(const std::string &)> &warn = {}) {
	auto scorer = effective_scorer(cfg, store);
	auto blocks = build_blocks(store, cfg.blocking_keys, workers);
	auto candidates = emit_candidates(store, blocks, cfg.candidate_filter(), workers, cfg.max_block_size, warn, stats);
	return build_link_set(store, candidates, scorer, cfg.s_m, workers);
}

/// Everything downstream of the record store, kept in memory.
struct LinkageResult {
	LinkSet links;
	CertificateGraph graph;
	std::vector<EdgeMatch> matched;
	CertificateMatchSet pairwise;
	CertificateMatchSet m_r;
	CertificateMatchSet m_g;
	CertificateMatchSet m_f;
	std::vector<LifeSegment> segments;
};

inline void build_graph(const PipelineConfig &cfg, const RecordStore &store, LinkageResult &r, std::size_t workers) {
	r.graph = CertificateGraph::build(r.links, store);
	r.matched = match_linkage_types(r.graph, store, cfg.linkage_types, &cfg.temporal, workers);
	r.pairwise = pairwise_match_set(r.graph, r.matched);
}

/// In-memory run from a record store to life segments.
inline LinkageResult run_linkage(const PipelineConfig &cfg, const RecordStore &store, std::size_t workers = 1) {
	LinkageResult r;
	r.links = link_individuals(cfg, store, workers);
	build_graph(cfg, store, r, workers);
	r.m_r = score_relational(r.graph, store, cfg.relational, cfg.linkage_types, r.matched, cfg.constraints(),
	                         cfg.assignment, workers);
	r.m_g = score_group(r.graph, store, cfg.group, cfg.linkage_types, r.matched, cfg.constraints(), cfg.assignment,
	                    workers);
	r.m_f = fuse(r.m_r, r.m_g, cfg.fusion);
	r.segments = assemble_life_segments(r.m_f, store, r.graph, cfg.linkage_types, cfg.role_pairs);
	return r;
}

struct RunOptions {
	std::filesystem::path out;
	std::size_t workers = 1;
	bool resume = false;
	std::optional<std::string> stop_after;
	std::function<void(const std::string &)> log = [](const std::string &) {};
};

namespace pipeline_detail {

inline std::string hex(std::uint64_t v) {
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
	return buf;
}

inline std::uint64_t hash_file(const std::filesystem::path &p, std::uint64_t h) {
	return config_detail::fnv1a(io::read_file(p), h);
}

template <class Fn>
void write_file(const std::filesystem::path &p, Fn &&fn) {
	auto tmp = p;
	tmp += ".tmp";
	{
		auto out = io::open_out(tmp);
		fn(out);
		out.flush();
		if (!out) {
			throw std::runtime_error("failed writing " + p.string());
		}
	}
	std::filesystem::rename(tmp, p);
}

} // namespace pipeline_detail

/// Files each stage leaves in the run directory.
inline const std::map<std::string, std::vector<std::string>> &stage_files() {
	static const std::map<std::string, std::vector<std::string>> f = {
	    {"ingest", {"store.tsv", "ingest_report.txt"}},
	    {"pairwise", {"links.tsv", "pairwise.tsv", "blocking_report.txt"}},
	    {"relational", {"m_r.tsv"}},
	    {"group", {"m_g.tsv"}},
	    {"fusion", {"m_f.tsv"}},
	    {"segments", {"segments.tsv"}}};
	return f;
}

/// The staged pipeline behind `poplink link`. Each stage records a
/// fingerprint of the config it read in manifest.json; with `resume` a
/// stage whose fingerprint and files are still in place is loaded instead
/// of recomputed.
class Pipeline {
public:
	Pipeline(const PipelineConfig &cfg, RunOptions opt) : cfg_(cfg), opt_(std::move(opt)) {
		if (opt_.stop_after) {
			check_stage(*opt_.stop_after);
		}
	}

	RecordStore store;
	LinkageResult result;
	std::vector<std::pair<std::string, double>> timing;
	std::vector<std::string> reused;

	void run() {
		std::filesystem::create_directories(opt_.out);
		load_manifest();
		std::uint64_t fp = ingest_fingerprint();
		for (const auto &stage : pipeline_stages()) {
			if (stage != "ingest") {
				fp = cfg_.fingerprint(stage, fp);
				if (stage == "pairwise" && cfg_.weighting == WeightingMode::Trained && cfg_.gold &&
				    std::filesystem::exists(*cfg_.gold)) {
					fp = pipeline_detail::hash_file(*cfg_.gold, fp);
				}
			}
			const auto t0 = std::chrono::steady_clock::now();
			if (can_reuse(stage, fp)) {
				load(stage);
				reused.push_back(stage);
				opt_.log(stage + ": reused");
			} else {
				compute(stage);
				manifest_["stages"][stage] = pipeline_detail::hex(fp);
				manifest_["last_stage"] = stage;
				save_manifest();
				opt_.log(stage + ": done");
			}
			timing.emplace_back(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
			write_timing();
			if (opt_.stop_after && *opt_.stop_after == stage) {
				break;
			}
		}
	}

private:
	std::filesystem::path file(const std::string &name) const { return opt_.out / name; }

	std::uint64_t ingest_fingerprint() const {
		auto h = cfg_.fingerprint("ingest", 0);
		for (const auto &[type, path] : cfg_.inputs) {
			if (std::filesystem::exists(path)) {
				h = pipeline_detail::hash_file(path, h);
			}
		}
		if (cfg_.entities && std::filesystem::exists(*cfg_.entities)) {
			h = pipeline_detail::hash_file(*cfg_.entities, h);
		}
		return h;
	}

	void load_manifest() {
		manifest_ = json::object();
		if (opt_.resume && std::filesystem::exists(file("manifest.json"))) {
			try {
				manifest_ = json::parse(io::read_file(file("manifest.json")));
			} catch (const json::exception &) {
				manifest_ = json::object();
			}
		}
		if (!manifest_.contains("stages") || !manifest_["stages"].is_object()) {
			manifest_["stages"] = json::object();
		}
		// Stages are recomputed from the first stale one onwards, so a stale
		// stage invalidates everything after it.
		stale_ = !opt_.resume;
	}

	void save_manifest() const {
		pipeline_detail::write_file(file("manifest.json"), [&](std::ostream &out) { out << manifest_.dump(2) << '\n'; });
	}

	bool can_reuse(const std::string &stage, std::uint64_t fp) {
		if (stale_) {
			return false;
		}
		const auto &st = manifest_["stages"];
		bool ok = st.contains(stage) && st[stage].is_string() && st[stage].get<std::string>() == pipeline_detail::hex(fp);
		for (const auto &f : stage_files().at(stage)) {
			ok = ok && std::filesystem::exists(file(f));
		}
		if (!ok) {
			stale_ = true;
			// forget everything from here on
			for (auto it = std::find(pipeline_stages().begin(), pipeline_stages().end(), stage);
			     it != pipeline_stages().end(); ++it) {
				manifest_["stages"].erase(*it);
			}
		}
		return ok;
	}

	void load(const std::string &stage) {
		if (stage == "ingest") {
			store = read_store_tsv(file("store.tsv"), cfg_.schema, cfg_.vocabulary);
		} else if (stage == "pairwise") {
			result.links = read_link_set(file("links.tsv"), store, cfg_.s_m);
			build_graph(cfg_, store, result, opt_.workers);
		} else if (stage == "relational") {
			result.m_r = read_match_set(file("m_r.tsv"), store, cfg_.linkage_types);
		} else if (stage == "group") {
			result.m_g = read_match_set(file("m_g.tsv"), store, cfg_.linkage_types);
		} else if (stage == "fusion") {
			result.m_f = read_match_set(file("m_f.tsv"), store, cfg_.linkage_types);
		} else if (stage == "segments") {
			result.segments = assemble_life_segments(result.m_f, store, result.graph, cfg_.linkage_types, cfg_.role_pairs);
		}
	}

	void compute(const std::string &stage) {
		const auto w = opt_.workers;
		if (stage == "ingest") {
			if (cfg_.inputs.empty()) {
				throw ConfigError("no input files configured under data");
			}
			for (const auto &[type, path] : cfg_.inputs) {
				if (!std::filesystem::exists(path)) {
					throw ConfigError("input file not found: " + path.string());
				}
			}
			IngestContext ctx{cfg_.schema, cfg_.vocabulary, cfg_.mapping, cfg_.ingest};
			auto res = ingest_files(cfg_.inputs, ctx);
			store = std::move(res.store);
			if (cfg_.entities) {
				store.attach_entities(read_entity_registry(*cfg_.entities));
			}
			pipeline_detail::write_file(file("store.tsv"), [&](std::ostream &out) { write_store_tsv(store, out); });
			pipeline_detail::write_file(file("ingest_report.txt"), [&](std::ostream &out) { out << res.report_text(); });
		} else if (stage == "pairwise") {
			BlockingStats stats;
			std::vector<std::string> warnings;
			result.links = link_individuals(cfg_, store, w, &stats, [&](const std::string &m) { warnings.push_back(m); });
			build_graph(cfg_, store, result, w);
			pipeline_detail::write_file(file("links.tsv"),
			                            [&](std::ostream &out) { write_link_set(result.links, store, out); });
			pipeline_detail::write_file(file("pairwise.tsv"), [&](std::ostream &out) {
				write_match_set(result.pairwise, store, cfg_.linkage_types, out);
			});
			pipeline_detail::write_file(file("blocking_report.txt"), [&](std::ostream &out) {
				out << "keys=" << cfg_.blocking_keys.size() << '\n';
				out << "blocks=" << stats.blocks << '\n';
				out << "oversized_blocks=" << stats.oversized_blocks << '\n';
				out << "compared_within_blocks=" << stats.compared_within_blocks << '\n';
				out << "candidates=" << stats.candidates << '\n';
				out << "links=" << result.links.links.size() << '\n';
				out << "certificate_edges=" << result.graph.edge_count() << '\n';
				out << "typed_edges=" << result.matched.size() << '\n';
				for (const auto &m : warnings) {
					out << "warning=" << m << '\n';
				}
			});
		} else if (stage == "relational") {
			result.m_r = score_relational(result.graph, store, cfg_.relational, cfg_.linkage_types, result.matched,
			                              cfg_.constraints(), cfg_.assignment, w);
			pipeline_detail::write_file(file("m_r.tsv"), [&](std::ostream &out) {
				write_match_set(result.m_r, store, cfg_.linkage_types, out);
			});
		} else if (stage == "group") {
			result.m_g = score_group(result.graph, store, cfg_.group, cfg_.linkage_types, result.matched,
			                         cfg_.constraints(), cfg_.assignment, w);
			pipeline_detail::write_file(file("m_g.tsv"), [&](std::ostream &out) {
				write_match_set(result.m_g, store, cfg_.linkage_types, out);
			});
		} else if (stage == "fusion") {
			result.m_f = fuse(result.m_r, result.m_g, cfg_.fusion);
			pipeline_detail::write_file(file("m_f.tsv"), [&](std::ostream &out) {
				write_match_set(result.m_f, store, cfg_.linkage_types, out, true);
			});
		} else if (stage == "segments") {
			result.segments = assemble_life_segments(result.m_f, store, result.graph, cfg_.linkage_types, cfg_.role_pairs);
			pipeline_detail::write_file(file("segments.tsv"),
			                            [&](std::ostream &out) { write_segments(result.segments, store, out); });
		}
	}

	void write_timing() const {
		pipeline_detail::write_file(file("timing.txt"), [&](std::ostream &out) {
			for (const auto &[stage, secs] : timing) {
				char buf[64];
				std::snprintf(buf, sizeof buf, "%.3f", secs);
				out << stage << '\t' << buf << '\n';
			}
		});
	}

	const PipelineConfig &cfg_;
	RunOptions opt_;
	json manifest_;
	bool stale_ = true;
};

/// Match sets of a run directory, in report order.
inline std::vector<std::pair<std::string, std::string>> evaluated_sets() {
	return {{"pairwise", "pairwise.tsv"}, {"relational", "m_r.tsv"}, {"group", "m_g.tsv"}, {"fused", "m_f.tsv"}};
}

/// Reports for every match set in `run_dir`: overall and per category.
/// Writes evaluation.txt and one PR curve per set.
inline std::string evaluate_run(const PipelineConfig &cfg, const std::filesystem::path &run_dir,
                                const std::optional<std::filesystem::path> &gold_path) {
	if (!std::filesystem::exists(run_dir / "store.tsv")) {
		throw ConfigError("run directory has no store.tsv: " + run_dir.string());
	}
	auto store = read_store_tsv(run_dir / "store.tsv", cfg.schema, cfg.vocabulary);
	auto gold = load_gold(cfg, store, gold_path);
	if (!gold) {
		throw ConfigError("evaluation needs a gold file (--gold or data.gold)");
	}
	std::string text = "gold.links=" + std::to_string(gold->size()) + "\n";
	text += "gold.unknown_ids=" + std::to_string(gold->unknown_ids) + "\n";
	for (const auto &[label, name] : evaluated_sets()) {
		if (!std::filesystem::exists(run_dir / name)) {
			continue;
		}
		auto m = read_match_set(run_dir / name, store, cfg.linkage_types);
		std::vector<PRReport> reports;
		reports.push_back(evaluate(m, *gold, store));
		for (const auto &cat : cfg.categories) {
			reports.push_back(evaluate(m, *gold, store, cat));
		}
		text += report_text(reports, label);
		pipeline_detail::write_file(run_dir / ("pr_" + label + ".tsv"),
		                            [&](std::ostream &out) { write_pr_curve(reports.front(), out); });
	}
	pipeline_detail::write_file(run_dir / "evaluation.txt", [&](std::ostream &out) { out << text; });
	return text;
}

/// The four binary options of the experiment grid.
struct SweepOption {
	std::string name;
	std::string off_value;
	std::string on_value;
};

inline std::vector<SweepOption> sweep_options() {
	return {{"missing_values", "include_as_zero", "exclude_attribute"},
	        {"weighting", "uniform", "trained"},
	        {"census_decade_limit", "false", "true"},
	        {"constraints", "false", "true"}};
}

/// Run all 16 option combinations on one record store and report AUC-PR of
/// every relational and group method, the pairwise baseline and the
/// configured fusion. Writes sweep_runs.tsv and sweep_summary.tsv (mean and
/// standard deviation per option value).
inline void sweep(const PipelineConfig &base, const RecordStore &store, const GoldLinkSet &gold,
                  const std::filesystem::path &out_dir, std::size_t workers,
                  const std::function<void(const std::string &)> &log = {}) {
	std::filesystem::create_directories(out_dir);
	const auto opts = sweep_options();
	struct Row {
		std::vector<bool> bits;
		std::string score_set;
		double auc;
	};
	std::vector<Row> rows;
	for (unsigned mask = 0; mask < 16; ++mask) {
		json patch = base.raw;
		std::vector<bool> bits;
		for (std::size_t i = 0; i < opts.size(); ++i) {
			bits.push_back((mask >> i) & 1u);
		}
		patch["pairwise"]["missing_values"] = bits[0] ? opts[0].on_value : opts[0].off_value;
		patch["pairwise"]["weighting"] = bits[1] ? "trained" : "uniform";
		patch["blocking"]["census_decade_limit"] = bits[2];
		patch["constraints"]["enabled"] = bits[3];
		auto cfg = PipelineConfig::from_json(patch, base.base_dir);
		LinkageResult r;
		r.links = link_individuals(cfg, store, workers);
		build_graph(cfg, store, r, workers);
		auto add = [&](const std::string &name, const CertificateMatchSet &m) {
			rows.push_back({bits, name, evaluate(m, gold, store).auc});
		};
		add("pairwise", r.pairwise);
		const auto table = relational_score_table(r.graph, cfg.linkage_types, r.matched, workers);
		for (auto m : kRelationalMethods) {
			auto mr = relational_match_set(r.graph, store, m, cfg.linkage_types, r.matched, table, cfg.constraints(),
			                               cfg.assignment);
			add("relational:" + std::string(to_string(m)), mr);
			if (m == cfg.relational) {
				r.m_r = std::move(mr);
			}
		}
		for (auto m : kGroupMethods) {
			auto mg =
			    score_group(r.graph, store, m, cfg.linkage_types, r.matched, cfg.constraints(), cfg.assignment, workers);
			add("group:" + std::string(to_string(m)), mg);
			if (m == cfg.group) {
				r.m_g = std::move(mg);
			}
		}
		add("fused", fuse(r.m_r, r.m_g, cfg.fusion));
		if (log) {
			log("sweep combination " + std::to_string(mask + 1) + "/16 done");
		}
	}
	pipeline_detail::write_file(out_dir / "sweep_runs.tsv", [&](std::ostream &out) {
		std::vector<std::string> header;
		for (const auto &o : opts) {
			header.push_back(o.name);
		}
		header.push_back("score_set");
		header.push_back("auc_pr");
		io::write_row(out, header);
		for (const auto &r : rows) {
			std::vector<std::string> f;
			for (std::size_t i = 0; i < opts.size(); ++i) {
				f.push_back(r.bits[i] ? opts[i].on_value : opts[i].off_value);
			}
			f.push_back(r.score_set);
			f.push_back(io::format_score(r.auc));
			io::write_row(out, f);
		}
	});
	std::vector<std::string> sets;
	for (const auto &r : rows) {
		if (std::find(sets.begin(), sets.end(), r.score_set) == sets.end()) {
			sets.push_back(r.score_set);
		}
	}
	pipeline_detail::write_file(out_dir / "sweep_summary.tsv", [&](std::ostream &out) {
		io::write_row(out, {"option", "value", "score_set", "runs", "mean_auc_pr", "std_auc_pr"});
		for (std::size_t i = 0; i < opts.size(); ++i) {
			for (bool v : {false, true}) {
				for (const auto &s : sets) {
					std::vector<double> xs;
					for (const auto &r : rows) {
						if (r.score_set == s && r.bits[i] == v) {
							xs.push_back(r.auc);
						}
					}
					double mean = 0.0;
					for (double x : xs) {
						mean += x;
					}
					mean /= static_cast<double>(xs.size());
					double var = 0.0;
					for (double x : xs) {
						var += (x - mean) * (x - mean);
					}
					double sd = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
					io::write_row(out, {opts[i].name, v ? opts[i].on_value : opts[i].off_value, s,
					                    std::to_string(xs.size()), io::format_score(mean), io::format_score(sd)});
				}
			}
		}
	});
}

} // namespace poplink
