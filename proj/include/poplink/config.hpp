#pragma once

#include "poplink/blocking.hpp"
#include "poplink/certificate_graph.hpp"
#include "poplink/comparators.hpp"
#include "poplink/constraints.hpp"
#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/evaluation.hpp"
#include "poplink/fusion.hpp"
#include "poplink/group.hpp"
#include "poplink/ingest.hpp"
#include "poplink/pairwise.hpp"
#include "poplink/record_store.hpp"
#include "poplink/relational.hpp"
#include "poplink/synthgen.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace poplink {

using json = nlohmann::json;

inline constexpr const char *kDefaultConfig = R"json(
{
  "data": {"birth": null, "death": null, "marriage": null, "census": null, "gold": null, "entities": null},
  "schema": {
    "attributes": ["first_name", "last_name", "gender", "age", "birth_year", "address", "occupation", "relationship"],
    "numeric": ["age", "birth_year"],
    "mapping": []
  },
  "cleaning": {"drop_roles": ["Informant"], "gender_aliases": {}, "age_units": {}},
  "roles": {
    "Birth": [
      {"name": "Baby", "gender": "any", "once": true, "adult": false},
      {"name": "Mother", "gender": "f", "adult": true},
      {"name": "Father", "gender": "m", "adult": true}
    ],
    "Death": [
      {"name": "Deceased", "gender": "any", "once": true, "adult": false},
      {"name": "Mother", "gender": "f", "adult": true},
      {"name": "Father", "gender": "m", "adult": true},
      {"name": "Spouse", "gender": "any", "adult": true}
    ],
    "Marriage": [
      {"name": "Bride", "gender": "f", "adult": true},
      {"name": "Groom", "gender": "m", "adult": true},
      {"name": "BrideMother", "gender": "f", "adult": true},
      {"name": "BrideFather", "gender": "m", "adult": true},
      {"name": "GroomMother", "gender": "f", "adult": true},
      {"name": "GroomFather", "gender": "m", "adult": true}
    ],
    "Census": [
      {"name": "Head", "gender": "any", "adult": true},
      {"name": "Wife", "gender": "f", "adult": true},
      {"name": "Son", "gender": "m", "adult": false},
      {"name": "Daughter", "gender": "f", "adult": false}
    ]
  },
  "role_pairs": "derived",
  "temporal": {
    "derived": true,
    "roles": [
      {"from": "Marriage:Bride", "to": "Marriage:BrideMother", "min": 12, "max": 999},
      {"from": "Marriage:Bride", "to": "Marriage:GroomMother", "min": 12, "max": 999},
      {"from": "Marriage:Groom", "to": "Marriage:BrideFather", "min": 12, "max": 999},
      {"from": "Marriage:Groom", "to": "Marriage:GroomFather", "min": 12, "max": 999}
    ],
    "certificates": []
  },
  "linkage": {
    "categories": ["birth-census", "birth-death", "birth-marriage", "census-census", "census-death",
                   "census-marriage", "death-marriage", "marriage-marriage"],
    "types": "derived",
    "neighbor_types": ["Birth", "Death", "Marriage", "Census"],
    "constraints": {"derived": true, "overrides": {}}
  },
  "blocking": {
    "templates": [
      {"role_sets": ["female", "male"], "attributes": [["first_name", "last_name"]],
       "encodings": ["double_metaphone", "soundex"]},
      {"role_sets": ["female", "male"], "attributes": [["first_name", "birth_year"], ["last_name", "birth_year"]],
       "encodings": ["double_metaphone"]}
    ],
    "keys": [],
    "max_block_size": 10000,
    "census_decade_limit": true
  },
  "pairwise": {
    "comparators": [
      {"attribute": "first_name", "kind": "jaro_winkler"},
      {"attribute": "last_name", "kind": "jaro_winkler"},
      {"attribute": "gender", "kind": "exact"},
      {"attribute": "birth_year", "kind": "year_diff", "d_max": 10},
      {"attribute": "address", "kind": "levenshtein"},
      {"attribute": "occupation", "kind": "levenshtein"}
    ],
    "missing_values": "exclude_attribute",
    "weighting": "uniform",
    "weights": {},
    "train_sample_size": 2000,
    "s_m": 0.4,
    "seed": 7
  },
  "relational": {"method": "multi_adar_adamic"},
  "group": {"method": "combined"},
  "constraints": {"enabled": true, "mode": "greedy"},
  "fusion": {"w_r": 0.5, "w_g": 0.5, "s_t": 0.5},
  "synthgen": {}
}
)json";

namespace config_detail {

/// Keys whose values are free-form maps and are not checked against the
/// defaults.
inline bool free_form(const std::string &path) {
	static const std::set<std::string> open = {"/roles",          "/cleaning/gender_aliases", "/cleaning/age_units",
	                                           "/pairwise/weights", "/linkage/constraints/overrides", "/synthgen",
	                                           "/data"};
	return open.count(path) != 0;
}

inline void check_keys(const json &user, const json &defaults, const std::string &path) {
	if (!user.is_object() || !defaults.is_object() || free_form(path)) {
		return;
	}
	for (const auto &[k, v] : user.items()) {
		if (!defaults.contains(k)) {
			throw ConfigError("unknown config key '" + path + "/" + k + "'");
		}
		check_keys(v, defaults.at(k), path + "/" + k);
	}
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ull) {
	for (unsigned char c : s) {
		h ^= c;
		h *= 1099511628211ull;
	}
	return h;
}

template <class T>
T get_or(const json &j, const char *key, T fallback) {
	return j.contains(key) && !j.at(key).is_null() ? j.at(key).get<T>() : fallback;
}

} // namespace config_detail

struct RoleTraits {
	char gender = 'a'; // 'f', 'm' or 'a' (any)
	bool once = false;
	bool adult = false;
};

inline PopulationParams parse_population_params(const json &j) {
	auto p = PopulationParams::with_default_pools();
	using config_detail::get_or;
	static const std::set<std::string> known = {
	    "seed",          "initial_population", "start_year",   "record_start_year", "end_year",     "census_years",
	    "birth_rate",    "marriage_rate",      "death_infant", "death_child",       "death_adult",  "death_elder",
	    "informant_rate", "first_name_skew",   "surname_skew", "female_names",      "male_names",   "surnames",
	    "occupations",   "addresses",          "variants",     "corruption"};
	for (const auto &[k, v] : j.items()) {
		if (!known.count(k)) {
			throw ConfigError("unknown synthgen key '" + k + "'");
		}
	}
	try {
		p.seed = get_or<std::uint64_t>(j, "seed", p.seed);
		p.initial_population = get_or<std::size_t>(j, "initial_population", p.initial_population);
		p.start_year = get_or<int>(j, "start_year", p.start_year);
		p.record_start_year = get_or<int>(j, "record_start_year", p.record_start_year);
		p.end_year = get_or<int>(j, "end_year", p.end_year);
		p.census_years = get_or<std::vector<int>>(j, "census_years", p.census_years);
		p.birth_rate = get_or<double>(j, "birth_rate", p.birth_rate);
		p.marriage_rate = get_or<double>(j, "marriage_rate", p.marriage_rate);
		p.death_infant = get_or<double>(j, "death_infant", p.death_infant);
		p.death_child = get_or<double>(j, "death_child", p.death_child);
		p.death_adult = get_or<double>(j, "death_adult", p.death_adult);
		p.death_elder = get_or<double>(j, "death_elder", p.death_elder);
		p.informant_rate = get_or<double>(j, "informant_rate", p.informant_rate);
		p.first_name_skew = get_or<double>(j, "first_name_skew", p.first_name_skew);
		p.surname_skew = get_or<double>(j, "surname_skew", p.surname_skew);
		p.female_names = get_or<std::vector<std::string>>(j, "female_names", p.female_names);
		p.male_names = get_or<std::vector<std::string>>(j, "male_names", p.male_names);
		p.surnames = get_or<std::vector<std::string>>(j, "surnames", p.surnames);
		p.occupations = get_or<std::vector<std::string>>(j, "occupations", p.occupations);
		p.addresses = get_or<std::vector<std::string>>(j, "addresses", p.addresses);
		p.variants = get_or<std::map<std::string, std::vector<std::string>>>(j, "variants", p.variants);
		if (j.contains("corruption")) {
			const auto &c = j.at("corruption");
			auto &r = p.corruption;
			r.typo = get_or<double>(c, "typo", r.typo);
			r.variant = get_or<double>(c, "variant", r.variant);
			r.missing = get_or<double>(c, "missing", r.missing);
			r.missing_by_attribute = get_or<std::map<std::string, double>>(c, "missing_by_attribute", r.missing_by_attribute);
			r.year_error = get_or<double>(c, "year_error", r.year_error);
			r.max_year_error = get_or<int>(c, "max_year_error", r.max_year_error);
			r.event_year_error = get_or<double>(c, "event_year_error", r.event_year_error);
			r.married_name = get_or<double>(c, "married_name", r.married_name);
		}
	} catch (const json::exception &e) {
		throw ConfigError(std::string("synthgen: ") + e.what());
	}
	p.validate();
	return p;
}

/// Everything the pipeline needs, resolved from JSON.
struct PipelineConfig {
	json raw;
	std::filesystem::path base_dir;
	bool has_synthgen = false; // the user file has a synthgen section

	std::map<CertificateType, std::filesystem::path> inputs;
	std::optional<std::filesystem::path> gold;
	std::optional<std::filesystem::path> entities;

	AttributeSchema schema;
	std::vector<std::size_t> numeric;
	MappingSchema mapping;
	IngestOptions ingest;

	RoleVocabulary vocabulary;
	std::vector<RoleTraits> traits; // by RoleId
	RolePairSet role_pairs;
	TemporalConstraintTable temporal;

	std::set<std::string> categories;
	std::vector<LinkageType> linkage_types;
	LinkConstraintTable link_constraints;

	std::vector<BlockingKey> blocking_keys;
	std::size_t max_block_size = 10000;
	bool census_decade_limit = true;

	RecordScorer scorer;
	WeightingMode weighting = WeightingMode::Uniform;
	std::size_t train_sample_size = 2000;
	double s_m = 0.4;
	std::uint64_t seed = 7;

	RelationalMethod relational = RelationalMethod::MultiAdarAdamic;
	GroupMethod group = GroupMethod::Combined;
	bool constraints_enabled = true;
	AssignmentMode assignment = AssignmentMode::Greedy;
	FusionParams fusion;

	PopulationParams synth;

	[[nodiscard]] const LinkConstraintTable *constraints() const {
		return constraints_enabled ? &link_constraints : nullptr;
	}

	[[nodiscard]] CandidateFilter candidate_filter() const { return {&role_pairs, &temporal, census_decade_limit}; }

	static json default_json() { return json::parse(kDefaultConfig, nullptr, true, true); }

	/// Defaults merge-patched with `user`.
	static PipelineConfig from_json(const json &user, const std::filesystem::path &base_dir = ".") {
		auto merged = default_json();
		if (!user.is_null()) {
			if (!user.is_object()) {
				throw ConfigError("config must be a JSON object");
			}
			config_detail::check_keys(user, merged, "");
			merged.merge_patch(user);
		}
		PipelineConfig c;
		c.raw = merged;
		c.base_dir = base_dir;
		c.has_synthgen = user.is_object() && user.contains("synthgen");
		try {
			c.resolve();
		} catch (const json::exception &e) {
			throw ConfigError(std::string("config: ") + e.what());
		}
		return c;
	}

	static PipelineConfig load(const std::filesystem::path &path) {
		std::ifstream in(path);
		if (!in) {
			throw ConfigError("cannot read config " + path.string());
		}
		json user;
		try {
			user = json::parse(in, nullptr, true, true);
		} catch (const json::exception &e) {
			throw ConfigError(path.string() + ": " + e.what());
		}
		return from_json(user, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
	}

	static PipelineConfig defaults() { return from_json(json()); }

	/// Stage fingerprint: the config sections a stage reads plus the
	/// fingerprint of the stage before it.
	[[nodiscard]] std::uint64_t fingerprint(const std::string &stage, std::uint64_t upstream) const {
		static const std::map<std::string, std::vector<std::string>> sections = {
		    {"ingest", {"data", "schema", "cleaning", "roles"}},
		    {"pairwise", {"role_pairs", "temporal", "blocking", "pairwise"}},
		    {"relational", {"linkage", "relational", "constraints"}},
		    {"group", {"linkage", "group", "constraints"}},
		    {"fusion", {"fusion"}},
		    {"segments", {}}};
		auto h = config_detail::fnv1a(stage + ":" + std::to_string(upstream));
		for (const auto &s : sections.at(stage)) {
			h = config_detail::fnv1a(raw.at(s).dump(), h);
		}
		return h;
	}

	[[nodiscard]] std::filesystem::path resolve_path(const std::string &p) const {
		std::filesystem::path path(p);
		return path.is_absolute() ? path : base_dir / path;
	}

private:
	void resolve() {
		resolve_data();
		resolve_schema();
		resolve_roles();
		resolve_role_pairs();
		resolve_temporal();
		resolve_linkage();
		resolve_blocking();
		resolve_pairwise();
		resolve_methods();
		synth = parse_population_params(raw.at("synthgen"));
	}

	void resolve_data() {
		const auto &d = raw.at("data");
		for (const auto &[k, v] : d.items()) {
			if (v.is_null()) {
				continue;
			}
			if (k == "gold") {
				gold = resolve_path(v.get<std::string>());
			} else if (k == "entities") {
				entities = resolve_path(v.get<std::string>());
			} else if (auto t = parse_certificate_type(k)) {
				inputs[*t] = resolve_path(v.get<std::string>());
			} else {
				throw ConfigError("unknown data entry '" + k + "'");
			}
		}
	}

	void resolve_schema() {
		const auto &s = raw.at("schema");
		schema = AttributeSchema(s.at("attributes").get<std::vector<std::string>>());
		for (const auto &n : s.at("numeric")) {
			numeric.push_back(schema.index_of(n.get<std::string>()));
		}
		for (const auto &m : s.at("mapping")) {
			auto type_name = config_detail::get_or<std::string>(m, "type", "*");
			auto role = config_detail::get_or<std::string>(m, "role", "*");
			auto column = m.at("column").get<std::string>();
			auto attribute = m.at("attribute").get<std::string>();
			if (type_name == "*") {
				for (auto t : kCertificateTypes) {
					mapping.map(t, role, column, attribute);
				}
			} else if (auto t = parse_certificate_type(type_name)) {
				mapping.map(*t, role, column, attribute);
			} else {
				throw ConfigError("unknown certificate type '" + type_name + "' in mapping");
			}
		}
		mapping.validate(schema);
		const auto &cl = raw.at("cleaning");
		ingest.drop_roles.clear();
		for (const auto &r : cl.at("drop_roles")) {
			ingest.drop_roles.insert(r.get<std::string>());
		}
		for (const auto &[k, v] : cl.at("gender_aliases").items()) {
			ingest.rules.gender_aliases[text::to_lower(k)] = v.get<std::string>();
		}
		for (const auto &[k, v] : cl.at("age_units").items()) {
			if (v.get<double>() <= 0.0) {
				throw ConfigError("age unit '" + k + "' needs a positive count per year");
			}
			ingest.rules.age_units[text::to_lower(k)] = v.get<double>();
		}
	}

	void resolve_roles() {
		for (const auto &[type_name, list] : raw.at("roles").items()) {
			auto t = parse_certificate_type(type_name);
			if (!t) {
				throw ConfigError("unknown certificate type '" + type_name + "' in roles");
			}
			for (const auto &r : list) {
				vocabulary.add(r.at("name").get<std::string>(), *t);
				RoleTraits tr;
				auto g = config_detail::get_or<std::string>(r, "gender", "any");
				if (g != "f" && g != "m" && g != "any") {
					throw ConfigError("role gender must be f, m or any");
				}
				tr.gender = g == "any" ? 'a' : g[0];
				tr.once = config_detail::get_or<bool>(r, "once", false);
				tr.adult = config_detail::get_or<bool>(r, "adult", false);
				traits.push_back(tr);
			}
		}
		if (vocabulary.size() == 0) {
			throw ConfigError("no roles configured");
		}
	}

	void resolve_role_pairs() {
		role_pairs = RolePairSet(vocabulary.size());
		const auto &rp = raw.at("role_pairs");
		if (rp.is_string()) {
			if (rp.get<std::string>() != "derived") {
				throw ConfigError("role_pairs must be \"derived\" or a list of pairs");
			}
			// Any two gender-compatible roles, except a once-only role with itself.
			for (RoleId a = 0; a < vocabulary.size(); ++a) {
				for (RoleId b = 0; b < vocabulary.size(); ++b) {
					const auto &ta = traits[a];
					const auto &tb = traits[b];
					bool gender_ok = ta.gender == 'a' || tb.gender == 'a' || ta.gender == tb.gender;
					if (gender_ok && !(a == b && ta.once)) {
						role_pairs.add(a, b);
					}
				}
			}
			return;
		}
		for (const auto &p : rp) {
			if (!p.is_array() || p.size() != 2) {
				throw ConfigError("role pair entries must be [role, role]");
			}
			role_pairs.add(vocabulary.resolve(p[0].get<std::string>()), vocabulary.resolve(p[1].get<std::string>()));
		}
	}

	void resolve_temporal() {
		temporal = TemporalConstraintTable(vocabulary.size());
		const auto &t = raw.at("temporal");
		if (t.at("derived").get<bool>()) {
			for (RoleId a = 0; a < vocabulary.size(); ++a) {
				const bool a_baby = vocabulary[a].certificate_type == CertificateType::Birth && traits[a].once;
				for (RoleId b = 0; b < vocabulary.size(); ++b) {
					if (a == b || !is_valid_role_pair(a, b, role_pairs)) {
						continue;
					}
					const bool b_deceased = vocabulary[b].certificate_type == CertificateType::Death && traits[b].once;
					if (a_baby) {
						temporal.set(a, b, {traits[b].adult ? 12 : -2, 999});
					} else if (b_deceased) {
						temporal.set(a, b, {-2, 999});
					}
				}
			}
		}
		for (const auto &w : t.at("roles")) {
			temporal.set(vocabulary.resolve(w.at("from").get<std::string>()),
			             vocabulary.resolve(w.at("to").get<std::string>()),
			             {w.at("min").get<int>(), w.at("max").get<int>()});
		}
		for (const auto &w : t.at("certificates")) {
			temporal.set_certificate_window(w.at("linkage_type").get<std::string>(),
			                                {w.at("min").get<int>(), w.at("max").get<int>()});
		}
	}

	static std::pair<CertificateType, CertificateType> split_category(const std::string &cat) {
		auto dash = cat.find('-');
		auto a = dash == std::string::npos ? std::nullopt : parse_certificate_type(cat.substr(0, dash));
		auto b = dash == std::string::npos ? std::nullopt : parse_certificate_type(cat.substr(dash + 1));
		if (!a || !b) {
			throw ConfigError("bad linkage category '" + cat + "'");
		}
		return {*a, *b};
	}

	void resolve_linkage() {
		const auto &l = raw.at("linkage");
		for (const auto &c : l.at("categories")) {
			auto [a, b] = split_category(c.get<std::string>());
			categories.insert(category_name(a, b));
		}
		// A type list, or "others": every type except the two being linked.
		auto neighbor_filter = [](const json &spec, CertificateType lt, CertificateType rt) {
			NeighborFilter f{0};
			if (spec.is_string()) {
				if (spec.get<std::string>() != "others") {
					throw ConfigError("neighbor_types must be a list of certificate types or \"others\"");
				}
				f = NeighborFilter::all();
				f.types &= static_cast<std::uint8_t>(~(1u << static_cast<unsigned>(lt)));
				f.types &= static_cast<std::uint8_t>(~(1u << static_cast<unsigned>(rt)));
				return f;
			}
			for (const auto &n : spec) {
				auto t = parse_certificate_type(n.get<std::string>());
				if (!t) {
					throw ConfigError("unknown neighbor type '" + n.get<std::string>() + "'");
				}
				f.types |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(*t));
			}
			return f;
		};
		const auto &neighbors = l.at("neighbor_types");
		const auto &types = l.at("types");
		if (types.is_string()) {
			if (types.get<std::string>() != "derived") {
				throw ConfigError("linkage types must be \"derived\" or a list");
			}
			// One type per category and ordered anchor role pair.
			for (const auto &cat : categories) {
				auto [lt, rt] = split_category(cat);
				for (RoleId a = 0; a < vocabulary.size(); ++a) {
					if (vocabulary[a].certificate_type != lt) {
						continue;
					}
					for (RoleId b = 0; b < vocabulary.size(); ++b) {
						if (vocabulary[b].certificate_type != rt || !is_valid_role_pair(a, b, role_pairs)) {
							continue;
						}
						linkage_types.push_back({cat + "/" + vocabulary[a].name + "-" + vocabulary[b].name, lt, rt, a, b,
						                         neighbor_filter(neighbors, lt, rt)});
					}
				}
			}
		} else {
			for (const auto &t : types) {
				LinkageType x;
				x.name = t.at("name").get<std::string>();
				x.left_role = vocabulary.resolve(t.at("left_role").get<std::string>());
				x.right_role = vocabulary.resolve(t.at("right_role").get<std::string>());
				x.left_type = vocabulary[x.left_role].certificate_type;
				x.right_type = vocabulary[x.right_role].certificate_type;
				x.neighbors = neighbor_filter(t.contains("neighbor_types") ? t.at("neighbor_types") : neighbors,
				                              x.left_type, x.right_type);
				linkage_types.push_back(x);
			}
		}
		std::set<std::string> names;
		for (const auto &t : linkage_types) {
			if (!names.insert(t.name).second) {
				throw ConfigError("duplicate linkage type '" + t.name + "'");
			}
		}
		const auto &c = l.at("constraints");
		if (c.at("derived").get<bool>()) {
			for (const auto &t : linkage_types) {
				const bool l1 = traits[t.left_role].once;
				const bool r1 = traits[t.right_role].once;
				link_constraints.set(t.name, l1 && r1 ? Cardinality::OneToOne
				                             : l1     ? Cardinality::OneToMany
				                             : r1     ? Cardinality::ManyToOne
				                                      : Cardinality::ManyToMany);
			}
		}
		for (const auto &[name, v] : c.at("overrides").items()) {
			auto card = parse_cardinality(v.get<std::string>());
			if (!card) {
				throw ConfigError("unknown cardinality '" + v.get<std::string>() + "'");
			}
			link_constraints.set(name, *card);
		}
		for (const auto &[name, card] : link_constraints.entries()) {
			if (!names.count(name)) {
				throw ConfigError("constraint names unknown linkage type '" + name + "'");
			}
		}
	}

	std::vector<RoleId> role_set(const json &spec) const {
		std::vector<RoleId> out;
		if (spec.is_string()) {
			auto name = spec.get<std::string>();
			char want = name == "female" ? 'f' : name == "male" ? 'm' : 0;
			if (!want) {
				throw ConfigError("unknown role set '" + name + "'");
			}
			for (RoleId r = 0; r < vocabulary.size(); ++r) {
				if (traits[r].gender == want || traits[r].gender == 'a') {
					out.push_back(r);
				}
			}
			return out;
		}
		for (const auto &r : spec) {
			out.push_back(vocabulary.resolve(r.get<std::string>()));
		}
		return out;
	}

	static std::string role_set_name(const json &spec) {
		if (spec.is_string()) {
			return spec.get<std::string>();
		}
		std::string out;
		for (const auto &r : spec) {
			out += (out.empty() ? "" : "+") + r.get<std::string>();
		}
		return out;
	}

	void resolve_blocking() {
		const auto &b = raw.at("blocking");
		for (const auto &t : b.at("templates")) {
			BlockingTemplate bt;
			for (const auto &rs : t.at("role_sets")) {
				bt.role_sets.emplace_back(role_set_name(rs), role_set(rs));
			}
			for (const auto &attrs : t.at("attributes")) {
				std::vector<std::size_t> a;
				for (const auto &x : attrs) {
					a.push_back(schema.index_of(x.get<std::string>()));
				}
				bt.attribute_sets.push_back(a);
			}
			for (const auto &e : t.at("encodings")) {
				bt.encodings.push_back(parse_encoding(e.get<std::string>()));
			}
			for (auto &k : expand_template(bt, schema, numeric)) {
				blocking_keys.push_back(std::move(k));
			}
		}
		for (const auto &k : b.at("keys")) {
			BlockingKey key;
			key.roles = role_set(k.at("roles"));
			key.id = config_detail::get_or<std::string>(k, "id", role_set_name(k.at("roles")));
			for (const auto &a : k.at("attributes")) {
				auto idx = schema.index_of(a.at("attribute").get<std::string>());
				key.attributes.push_back(idx);
				auto enc = parse_encoding(config_detail::get_or<std::string>(a, "encoding", "none"));
				if (std::find(numeric.begin(), numeric.end(), idx) != numeric.end()) {
					enc = Encoding::None;
				}
				key.encodings.push_back(enc);
				if (k.contains("id") == false) {
					key.id += "/" + schema[idx];
					if (enc != Encoding::None) {
						key.id += ":" + std::string(to_string(enc));
					}
				}
			}
			blocking_keys.push_back(std::move(key));
		}
		if (blocking_keys.empty()) {
			throw ConfigError("no blocking keys configured");
		}
		for (const auto &k : blocking_keys) {
			validate_key(k, role_pairs, vocabulary);
		}
		max_block_size = b.at("max_block_size").get<std::size_t>();
		census_decade_limit = b.at("census_decade_limit").get<bool>();
	}

	void resolve_pairwise() {
		const auto &p = raw.at("pairwise");
		const auto &weights = p.at("weights");
		for (const auto &c : p.at("comparators")) {
			AttributeComparator ac;
			ac.attribute = schema.index_of(c.at("attribute").get<std::string>());
			ac.spec = ComparatorSpec::parse(c.at("kind").get<std::string>());
			ac.spec.prefix_weight = config_detail::get_or<double>(c, "prefix_weight", ac.spec.prefix_weight);
			ac.spec.prefix_cap = config_detail::get_or<std::size_t>(c, "prefix_cap", ac.spec.prefix_cap);
			ac.spec.boost_threshold = config_detail::get_or<double>(c, "boost_threshold", ac.spec.boost_threshold);
			ac.spec.d_max = config_detail::get_or<int>(c, "d_max", ac.spec.d_max);
			ac.spec.validate();
			scorer.comparators.push_back(ac);
			scorer.weights.push_back(config_detail::get_or<double>(weights, schema[ac.attribute].c_str(), 1.0));
		}
		for (const auto &[k, v] : weights.items()) {
			bool used = false;
			for (const auto &ac : scorer.comparators) {
				used = used || schema[ac.attribute] == k;
			}
			if (!used) {
				throw ConfigError("weight given for attribute '" + k + "' without a comparator");
			}
		}
		scorer.missing = parse_missing_value_policy(p.at("missing_values").get<std::string>());
		scorer.validate();
		weighting = parse_weighting_mode(p.at("weighting").get<std::string>());
		train_sample_size = p.at("train_sample_size").get<std::size_t>();
		s_m = p.at("s_m").get<double>();
		validate_threshold(s_m, "s_m");
		seed = p.at("seed").get<std::uint64_t>();
	}

	void resolve_methods() {
		relational = parse_relational_method(raw.at("relational").at("method").get<std::string>());
		group = parse_group_method(raw.at("group").at("method").get<std::string>());
		constraints_enabled = raw.at("constraints").at("enabled").get<bool>();
		assignment = parse_assignment_mode(raw.at("constraints").at("mode").get<std::string>());
		const auto &f = raw.at("fusion");
		fusion.w_r = f.at("w_r").get<double>();
		fusion.w_g = f.at("w_g").get<double>();
		fusion.s_t = f.at("s_t").get<double>();
		fusion.validate();
	}
};

} // namespace poplink
