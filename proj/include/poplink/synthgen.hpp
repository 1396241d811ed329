#pragma once

#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/io.hpp"
#include "poplink/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace poplink {

struct CorruptionRates {
	double typo = 0.0;
	double variant = 0.0;
	double missing = 0.0;
	std::map<std::string, double> missing_by_attribute; // overrides `missing`
	double year_error = 0.0;
	int max_year_error = 2;
	double event_year_error = 0.0;
	double married_name = 0.0; // women recorded under the husband's surname after marriage
};

struct PopulationParams {
	std::uint64_t seed = 1;
	std::size_t initial_population = 600;
	int start_year = 1820;
	int record_start_year = 1851;
	int end_year = 1901;
	std::vector<int> census_years = {1851, 1861, 1871, 1881, 1891, 1901};

	double birth_rate = 0.28;    // per fertile couple and year
	double marriage_rate = 0.12; // per eligible woman and year
	double death_infant = 0.08;
	double death_child = 0.006;
	double death_adult = 0.009;
	double death_elder = 0.06;
	double informant_rate = 0.5; // death certificates carrying an Informant row

	double first_name_skew = 0.35; // top-5 share of first names over both sexes
	double surname_skew = 0.35;

	std::vector<std::string> female_names;
	std::vector<std::string> male_names;
	std::vector<std::string> surnames;
	std::vector<std::string> occupations;
	std::vector<std::string> addresses;
	std::map<std::string, std::vector<std::string>> variants;

	CorruptionRates corruption;

	static PopulationParams with_default_pools() {
		PopulationParams p;
		p.female_names = {"mary",     "margaret", "catherine", "ann",      "christina", "marion",  "janet",
		                  "flora",    "isabella", "jessie",    "effie",    "sarah",     "jane",    "elizabeth",
		                  "rachel",   "peggy",    "johanna",   "kate",     "grace",     "lexy",    "marjory",
		                  "mor",      "agnes",    "jean",      "helen",    "barbara",   "euphemia", "susan",
		                  "julia",    "annabella", "penelope", "alexandrina", "roderica", "williamina", "donaldina",
		                  "murdina",  "lachlanina", "colina",  "henrietta", "louisa"};
		p.male_names = {"john",      "donald",   "alexander", "angus",     "malcolm",  "neil",     "norman",
		                "roderick",  "murdo",    "kenneth",   "lachlan",   "ewen",     "james",    "william",
		                "duncan",    "archibald", "allan",    "hector",    "peter",    "charles",  "finlay",
		                "samuel",    "martin",   "hugh",      "farquhar",  "torquil",  "ranald",   "evander",
		                "lauchlan",  "colin",    "robert",    "david",     "george",   "thomas",   "andrew",
		                "dugald",    "alasdair", "ronald",    "calum",     "iain"};
		p.surnames = {"macdonald", "mackinnon", "macleod",   "nicolson",  "mackenzie", "campbell", "matheson",
		              "maclean",   "macrae",    "macinnes",  "beaton",    "macaskill", "macpherson", "ross",
		              "stewart",   "morrison",  "robertson", "macintyre", "maclennan", "murray",   "fraser",
		              "grant",     "cameron",   "lamont",    "macmillan", "buchanan",  "macqueen", "gillies",
		              "mackay",    "macsween",  "shaw",      "martin",    "macrimmon", "maccrimmon", "macfarlane",
		              "macvicar",  "cumming",   "graham",    "munro",     "urquhart",  "chisholm", "sinclair",
		              "macleay",   "macnab",    "finlayson", "macneil",   "macphee",   "bruce",    "ferguson",
		              "macgregor", "macaulay",  "macivor",   "maciver",   "henderson", "macfie",   "boyd"};
		p.occupations = {"crofter",  "fisherman", "shepherd",  "labourer", "weaver",   "tailor",  "carpenter",
		                 "mason",    "blacksmith", "merchant", "boatman",  "cottar",   "shoemaker", "innkeeper",
		                 "teacher",  "miller",    "ploughman", "gamekeeper", "joiner", "seaman"};
		p.addresses = {"portree",    "broadford", "dunvegan",   "uig",      "kilmuir",   "snizort", "sleat",
		               "strath",     "bracadale", "duirinish",  "minginish", "staffin", "carbost", "elgol",
		               "waternish",  "glendale",  "kyleakin",   "breakish", "edinbane", "flodigarry", "kensaleyre",
		               "struan",     "balmeanach", "torrin",    "ord",      "tarskavaig", "armadale", "isleornsay",
		               "luib",       "sconser",   "braes",      "peinchorran", "borve", "skeabost", "tote"};
		p.variants = {{"margaret", {"marjory", "maggie"}},    {"catherine", {"katherine", "kate"}},
		              {"ann", {"anne", "annie"}},             {"mary", {"marie", "may"}},
		              {"christina", {"christy", "kirsty"}},   {"isabella", {"isabel", "bella"}},
		              {"janet", {"jessie", "jenny"}},         {"jessie", {"janet"}},
		              {"euphemia", {"effie"}},                {"effie", {"euphemia"}},
		              {"john", {"jon", "johnny"}},            {"donald", {"donal", "dan"}},
		              {"alexander", {"alex", "alistair"}},    {"alasdair", {"alexander", "alistair"}},
		              {"malcolm", {"calum"}},                 {"calum", {"malcolm"}},
		              {"neil", {"neill", "niel"}},            {"norman", {"tormod"}},
		              {"roderick", {"rory", "roderic"}},      {"kenneth", {"kenny"}},
		              {"lachlan", {"lauchlan"}},              {"ewen", {"ewan", "hugh"}},
		              {"macdonald", {"mcdonald"}},            {"mackinnon", {"mckinnon"}},
		              {"macleod", {"mcleod"}},                {"mackenzie", {"mckenzie"}},
		              {"maclean", {"mclean"}},                {"macrae", {"mcrae"}},
		              {"nicolson", {"nicholson"}},            {"macinnes", {"mcinnes"}},
		              {"macaskill", {"mcaskill"}},            {"macpherson", {"mcpherson"}},
		              {"maciver", {"macivor"}},               {"macivor", {"maciver"}},
		              {"maccrimmon", {"macrimmon"}},          {"macrimmon", {"maccrimmon"}}};
		return p;
	}

	void validate() const {
		auto rate = [](double r, const char *name) {
			if (!(r >= 0.0 && r <= 1.0)) {
				throw ConfigError(std::string("synthetic rate '") + name + "' must lie in [0, 1]");
			}
		};
		rate(birth_rate, "birth_rate");
		rate(marriage_rate, "marriage_rate");
		rate(death_infant, "death_infant");
		rate(death_child, "death_child");
		rate(death_adult, "death_adult");
		rate(death_elder, "death_elder");
		rate(informant_rate, "informant_rate");
		rate(corruption.typo, "typo");
		rate(corruption.variant, "variant");
		rate(corruption.missing, "missing");
		rate(corruption.year_error, "year_error");
		rate(corruption.event_year_error, "event_year_error");
		rate(corruption.married_name, "married_name");
		for (const auto &[a, r] : corruption.missing_by_attribute) {
			rate(r, a.c_str());
		}
		if (corruption.max_year_error < 1) {
			throw ConfigError("max_year_error must be at least 1");
		}
		if (!(start_year <= record_start_year && record_start_year <= end_year)) {
			throw ConfigError("synthetic years need start_year <= record_start_year <= end_year");
		}
		for (int y : census_years) {
			if (y < start_year || y > end_year) {
				throw ConfigError("census year " + std::to_string(y) + " lies outside the simulated range");
			}
		}
		if (initial_population < 2) {
			throw ConfigError("initial_population must be at least 2");
		}
		if (female_names.size() < 6 || male_names.size() < 6 || surnames.size() < 6) {
			throw ConfigError("name pools need at least six names each");
		}
		if (occupations.empty() || addresses.empty()) {
			throw ConfigError("occupation and address pools must not be empty");
		}
		for (double s : {first_name_skew, surname_skew}) {
			if (!(s > 0.0 && s < 1.0)) {
				throw ConfigError("name skew targets must lie in (0, 1)");
			}
		}
	}
};

namespace synth_detail {

inline std::vector<double> zipf(std::size_t n, double alpha) {
	std::vector<double> w(n);
	double total = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		w[i] = std::pow(static_cast<double>(i + 1), -alpha);
		total += w[i];
	}
	for (auto &x : w) {
		x /= total;
	}
	return w;
}

/// Share of the five most frequent values when `pools` (disjoint value sets,
/// equally likely) each follow a Zipf law with exponent alpha.
inline double top5_share(const std::vector<std::size_t> &pools, double alpha) {
	std::vector<double> all;
	for (auto n : pools) {
		for (double p : zipf(n, alpha)) {
			all.push_back(p / static_cast<double>(pools.size()));
		}
	}
	std::sort(all.rbegin(), all.rend());
	double s = 0.0;
	for (std::size_t i = 0; i < std::min<std::size_t>(5, all.size()); ++i) {
		s += all[i];
	}
	return s;
}

/// Zipf exponent whose top-5 share hits `target` (bisection; the share grows
/// with the exponent).
inline double solve_alpha(const std::vector<std::size_t> &pools, double target) {
	double lo = 0.0;
	double hi = 8.0;
	if (top5_share(pools, lo) >= target) {
		return lo;
	}
	for (int it = 0; it < 100; ++it) {
		double mid = (lo + hi) / 2.0;
		if (top5_share(pools, mid) < target) {
			lo = mid;
		} else {
			hi = mid;
		}
	}
	return (lo + hi) / 2.0;
}

inline std::string capitalize(std::string s) {
	if (!s.empty()) {
		s[0] = text::ascii_upper(s[0]);
	}
	// Mac/Mc prefixes keep their inner capital
	for (const char *prefix : {"mac", "mc"}) {
		std::string_view p(prefix);
		if (text::to_lower(s).rfind(p, 0) == 0 && s.size() > p.size() + 2) {
			s[p.size()] = text::ascii_upper(s[p.size()]);
		}
	}
	return s;
}

} // namespace synth_detail

/// One edit (insert, delete or substitute) at a random position.
template <class Rng>
std::string typo(std::string_view s, Rng &rng) {
	static constexpr std::string_view letters = "abcdefghijklmnopqrstuvwxyz";
	std::string out(s);
	std::uniform_int_distribution<int> kind(0, out.size() > 1 ? 2 : 1);
	std::uniform_int_distribution<std::size_t> letter(0, letters.size() - 1);
	switch (kind(rng)) {
	case 0: { // insert
		std::uniform_int_distribution<std::size_t> pos(0, out.size());
		out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos(rng)), letters[letter(rng)]);
		break;
	}
	case 1: { // substitute
		if (out.empty()) {
			out.push_back(letters[letter(rng)]);
			break;
		}
		std::uniform_int_distribution<std::size_t> pos(0, out.size() - 1);
		auto p = pos(rng);
		char c;
		do {
			c = letters[letter(rng)];
		} while (c == text::ascii_lower(out[p]));
		out[p] = c;
		break;
	}
	default: { // delete
		std::uniform_int_distribution<std::size_t> pos(0, out.size() - 1);
		out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos(rng)));
		break;
	}
	}
	return out;
}

/// Raw values of one emitted record, before corruption.
struct RawPersonRecord {
	std::string role;
	std::string entity; // empty for people outside the simulation (informants)
	std::string first_name;
	std::string last_name;
	char gender = 'f';
	int age = 0;
	std::string address;
	std::string occupation;
};

struct RawCertificate {
	CertificateType type;
	int event_year;
	std::vector<RawPersonRecord> members;
};

/// Generated corpus: one CSV table per certificate type plus gold data.
struct SyntheticCorpus {
	std::map<CertificateType, std::vector<std::vector<std::string>>> tables; // rows incl. header
	std::vector<std::vector<std::string>> gold;                              // incl. header
	std::vector<std::vector<std::string>> entities;                          // incl. header
	std::size_t people = 0;
	std::size_t records = 0;
	double top5_first_name_share = 0.0;

	void write(const std::filesystem::path &dir) const {
		std::filesystem::create_directories(dir);
		auto dump = [&](const std::filesystem::path &p, const std::vector<std::vector<std::string>> &rows, bool csv) {
			auto out = io::open_out(p);
			for (const auto &row : rows) {
				if (csv) {
					for (std::size_t i = 0; i < row.size(); ++i) {
						out << (i ? "," : "") << io::csv_escape(row[i]);
					}
					out << '\n';
				} else {
					io::write_row(out, row);
				}
			}
		};
		for (const auto &[type, rows] : tables) {
			dump(dir / (text::to_lower(to_string(type)) + ".csv"), rows, true);
		}
		dump(dir / "gold.tsv", gold, false);
		dump(dir / "entities.tsv", entities, false);
	}
};

class PopulationSimulator {
public:
	explicit PopulationSimulator(PopulationParams p) : p_(std::move(p)), rng_(p_.seed) {
		p_.validate();
		const double a_first =
		    synth_detail::solve_alpha({p_.female_names.size(), p_.male_names.size()}, p_.first_name_skew);
		const double a_last = synth_detail::solve_alpha({p_.surnames.size()}, p_.surname_skew);
		female_w_ = synth_detail::zipf(p_.female_names.size(), a_first);
		male_w_ = synth_detail::zipf(p_.male_names.size(), a_first);
		surname_w_ = synth_detail::zipf(p_.surnames.size(), a_last);
	}

	SyntheticCorpus run() {
		found();
		for (int y = p_.start_year; y <= p_.end_year; ++y) {
			deaths(y);
			marriages(y);
			births(y);
			if (std::find(p_.census_years.begin(), p_.census_years.end(), y) != p_.census_years.end()) {
				census(y);
			}
		}
		return emit();
	}

private:
	struct Person {
		std::string first;
		std::string surname; // birth surname
		char gender;
		int birth_year;
		int mother = -1;
		int father = -1;
		int spouse = -1; // current living spouse
		bool married_ever = false;
		bool alive = true;
		int husband_surname_of = -1; // last husband, for married-name recording
		std::string address{};
		std::string occupation{};
	};

	double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
	bool chance(double p) { return uniform() < p; }
	template <class T>
	const T &pick(const std::vector<T> &v) {
		return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng_)];
	}
	std::size_t pick_weighted(const std::vector<double> &w) {
		return std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng_);
	}
	std::string first_name(char gender) {
		return gender == 'f' ? p_.female_names[pick_weighted(female_w_)] : p_.male_names[pick_weighted(male_w_)];
	}
	std::string occupation_for(const Person &x, int year) {
		if (x.gender == 'm' && year - x.birth_year >= 14) {
			return pick(p_.occupations);
		}
		if (x.gender == 'f' && year - x.birth_year >= 14 && chance(0.2)) {
			return "domestic servant";
		}
		return "";
	}

	int add_person(Person x) {
		people_.push_back(std::move(x));
		return static_cast<int>(people_.size() - 1);
	}

	void found() {
		const int y = p_.start_year;
		std::size_t couples = p_.initial_population / 3;
		for (std::size_t i = 0; i < couples; ++i) {
			int age_h = std::uniform_int_distribution<int>(22, 50)(rng_);
			int age_w = std::clamp(age_h - std::uniform_int_distribution<int>(0, 6)(rng_), 18, 45);
			auto address = pick(p_.addresses);
			Person h{first_name('m'), p_.surnames[pick_weighted(surname_w_)], 'm', y - age_h};
			Person w{first_name('f'), p_.surnames[pick_weighted(surname_w_)], 'f', y - age_w};
			h.address = w.address = address;
			h.occupation = occupation_for(h, y);
			h.married_ever = w.married_ever = true;
			int hi = add_person(std::move(h));
			int wi = add_person(std::move(w));
			people_[hi].spouse = wi;
			people_[wi].spouse = hi;
			people_[wi].husband_surname_of = hi;
		}
		while (people_.size() < p_.initial_population) {
			char g = chance(0.5) ? 'f' : 'm';
			int age = std::uniform_int_distribution<int>(16, 30)(rng_);
			Person s{first_name(g), p_.surnames[pick_weighted(surname_w_)], g, y - age};
			s.address = pick(p_.addresses);
			s.occupation = occupation_for(s, y);
			add_person(std::move(s));
		}
	}

	bool recorded(int y) const { return y >= p_.record_start_year; }

	void deaths(int y) {
		for (std::size_t i = 0; i < people_.size(); ++i) {
			auto &x = people_[i];
			if (!x.alive) {
				continue;
			}
			int age = y - x.birth_year;
			double h = age < 1 ? p_.death_infant : age < 15 ? p_.death_child : age < 55 ? p_.death_adult
			                                                                              : p_.death_elder;
			if (age >= 55) {
				h *= 1.0 + (age - 55) / 10.0;
			}
			if (!chance(h)) {
				continue;
			}
			x.alive = false;
			int spouse = x.spouse;
			if (spouse >= 0) {
				people_[spouse].spouse = -1;
			}
			if (!recorded(y)) {
				continue;
			}
			RawCertificate c{CertificateType::Death, y, {}};
			c.members.push_back(raw(static_cast<int>(i), "Deceased", y, true));
			if (x.mother >= 0) {
				c.members.push_back(raw(x.mother, "Mother", y, false));
			}
			if (x.father >= 0) {
				c.members.push_back(raw(x.father, "Father", y, false));
			}
			if (spouse >= 0) {
				c.members.push_back(raw(spouse, "Spouse", y, true));
			}
			if (chance(p_.informant_rate)) {
				char g = chance(0.5) ? 'f' : 'm';
				RawPersonRecord inf{"Informant", "", first_name(g), p_.surnames[pick_weighted(surname_w_)], g, -1,
				                    "", ""};
				c.members.push_back(inf);
			}
			certs_.push_back(std::move(c));
		}
	}

	bool siblings(int a, int b) const {
		const auto &x = people_[a];
		const auto &z = people_[b];
		return (x.mother >= 0 && x.mother == z.mother) || (x.father >= 0 && x.father == z.father);
	}

	void marriages(int y) {
		std::vector<int> women;
		std::vector<int> men;
		for (std::size_t i = 0; i < people_.size(); ++i) {
			const auto &x = people_[i];
			if (!x.alive || x.spouse >= 0) {
				continue;
			}
			int age = y - x.birth_year;
			if (x.gender == 'f' && age >= 17 && age <= 45) {
				women.push_back(static_cast<int>(i));
			} else if (x.gender == 'm' && age >= 19 && age <= 60) {
				men.push_back(static_cast<int>(i));
			}
		}
		std::shuffle(men.begin(), men.end(), rng_);
		std::vector<char> taken(men.size(), 0);
		for (int w : women) {
			if (!chance(p_.marriage_rate)) {
				continue;
			}
			for (std::size_t k = 0; k < men.size(); ++k) {
				int m = men[k];
				int gap = people_[w].birth_year - people_[m].birth_year;
				if (taken[k] || siblings(w, m) || gap < -5 || gap > 15) {
					continue;
				}
				taken[k] = 1;
				marry(w, m, y);
				break;
			}
		}
	}

	void marry(int w, int m, int y) {
		if (recorded(y)) {
			RawCertificate c{CertificateType::Marriage, y, {}};
			c.members.push_back(raw(w, "Bride", y, false));
			c.members.push_back(raw(m, "Groom", y, false));
			const auto &bw = people_[w];
			const auto &gm = people_[m];
			if (bw.mother >= 0) {
				c.members.push_back(raw(bw.mother, "BrideMother", y, false));
			}
			if (bw.father >= 0) {
				c.members.push_back(raw(bw.father, "BrideFather", y, false));
			}
			if (gm.mother >= 0) {
				c.members.push_back(raw(gm.mother, "GroomMother", y, false));
			}
			if (gm.father >= 0) {
				c.members.push_back(raw(gm.father, "GroomFather", y, false));
			}
			certs_.push_back(std::move(c));
		}
		auto &bw = people_[w];
		auto &gm = people_[m];
		bw.spouse = m;
		gm.spouse = w;
		bw.married_ever = gm.married_ever = true;
		bw.husband_surname_of = m;
		if (chance(0.5)) {
			gm.address = pick(p_.addresses);
		}
		bw.address = gm.address;
	}

	void births(int y) {
		const std::size_t n = people_.size();
		for (std::size_t i = 0; i < n; ++i) {
			const auto &w = people_[i];
			if (!w.alive || w.gender != 'f' || w.spouse < 0) {
				continue;
			}
			int age = y - w.birth_year;
			if (age < 18 || age > 45 || !chance(p_.birth_rate)) {
				continue;
			}
			int father = w.spouse;
			char g = chance(0.5) ? 'f' : 'm';
			Person child{first_name(g), people_[father].surname, g, y};
			child.mother = static_cast<int>(i);
			child.father = father;
			child.address = people_[i].address;
			int ci = add_person(std::move(child));
			if (recorded(y)) {
				RawCertificate c{CertificateType::Birth, y, {}};
				c.members.push_back(raw(ci, "Baby", y, false));
				c.members.push_back(raw(static_cast<int>(i), "Mother", y, false));
				c.members.push_back(raw(father, "Father", y, false));
				certs_.push_back(std::move(c));
			}
		}
	}

	/// Household head of a living person: the husband of a married couple, a
	/// widowed or independent adult themselves, an unmarried child follows
	/// its parent's household.
	int head_of(int i) const {
		for (int guard = 0; guard < 64; ++guard) {
			const auto &x = people_[i];
			if (x.spouse >= 0) {
				return x.gender == 'm' ? i : x.spouse;
			}
			if (x.married_ever) {
				return i;
			}
			int parent = -1;
			if (x.father >= 0 && people_[x.father].alive) {
				parent = x.father;
			} else if (x.mother >= 0 && people_[x.mother].alive) {
				parent = x.mother;
			}
			if (parent < 0) {
				return i;
			}
			i = parent;
		}
		return i;
	}

	void census(int y) {
		if (!recorded(y)) {
			return;
		}
		std::map<int, std::vector<int>> households;
		for (std::size_t i = 0; i < people_.size(); ++i) {
			if (people_[i].alive && people_[i].birth_year <= y) {
				households[head_of(static_cast<int>(i))].push_back(static_cast<int>(i));
			}
		}
		for (auto &[head, members] : households) {
			std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
				auto rank = [&](int x) { return x == head ? 0 : x == people_[head].spouse ? 1 : 2; };
				return std::make_pair(rank(a), people_[a].birth_year) < std::make_pair(rank(b), people_[b].birth_year);
			});
			RawCertificate c{CertificateType::Census, y, {}};
			for (int x : members) {
				std::string role = x == head                   ? "Head"
				                   : x == people_[head].spouse ? "Wife"
				                   : people_[x].gender == 'm'  ? "Son"
				                                               : "Daughter";
				auto r = raw(x, role, y, role == "Head" || role == "Wife");
				r.address = people_[head].address;
				c.members.push_back(std::move(r));
			}
			certs_.push_back(std::move(c));
		}
	}

	RawPersonRecord raw(int i, std::string role, int y, bool may_use_married_name) {
		auto &x = people_[i];
		RawPersonRecord r;
		r.role = std::move(role);
		r.entity = "P" + std::to_string(100000 + i);
		r.first_name = x.first;
		r.last_name = x.surname;
		if (may_use_married_name && x.gender == 'f' && x.husband_surname_of >= 0 &&
		    chance(p_.corruption.married_name)) {
			r.last_name = people_[x.husband_surname_of].surname;
		}
		r.gender = x.gender;
		r.age = y - x.birth_year;
		r.address = x.address;
		if (x.occupation.empty() || chance(0.1)) {
			x.occupation = occupation_for(x, y);
		}
		r.occupation = x.occupation;
		return r;
	}

	std::string corrupt_name(std::string v) {
		const auto &c = p_.corruption;
		if (chance(c.variant)) {
			if (auto it = p_.variants.find(v); it != p_.variants.end() && !it->second.empty()) {
				v = pick(it->second);
			}
		}
		if (chance(c.typo)) {
			v = typo(v, rng_);
		}
		return v;
	}

	bool drop(const std::string &attribute) {
		auto it = p_.corruption.missing_by_attribute.find(attribute);
		return chance(it == p_.corruption.missing_by_attribute.end() ? p_.corruption.missing : it->second);
	}

	std::string age_text(int age, int months) {
		if (age > 0) {
			return std::to_string(age);
		}
		switch (std::uniform_int_distribution<int>(0, 2)(rng_)) {
		case 0:
			return std::to_string(months) + " mo";
		case 1:
			return std::to_string(months * 4 + 1) + " weeks";
		default:
			return "0";
		}
	}

	std::string gender_text(char g) {
		static const std::vector<std::string> f = {"F", "Female", "female", "f."};
		static const std::vector<std::string> m = {"M", "Male", "male", "m."};
		return g == 'f' ? pick(f) : pick(m);
	}

	SyntheticCorpus emit() {
		SyntheticCorpus corpus;
		corpus.people = people_.size();
		const std::vector<std::string> header = {"certificate_id", "event_year", "role", "record_id", "forename",
		                                         "surname",        "sex",        "age",  "address",   "occupation"};
		std::map<CertificateType, std::size_t> counters;
		std::map<std::string, std::vector<std::string>> certs_of_entity;
		std::map<std::string, std::size_t> first_counts;
		std::size_t first_total = 0;
		corpus.entities.push_back({"record_id", "entity_id"});
		std::map<std::string, CertificateType> cert_type;
		for (auto t : kCertificateTypes) {
			corpus.tables[t].push_back(header);
		}
		const auto &c = p_.corruption;
		for (auto &cert : certs_) {
			std::string prefix(1, to_string(cert.type)[0]);
			auto n = ++counters[cert.type];
			char buf[32];
			std::snprintf(buf, sizeof buf, "%s%06zu", prefix.c_str(), n);
			std::string cert_id = buf;
			cert_type[cert_id] = cert.type;
			int year = cert.event_year;
			if (cert.type != CertificateType::Census && chance(c.event_year_error)) {
				int k = std::uniform_int_distribution<int>(1, c.max_year_error)(rng_);
				year += chance(0.5) ? k : -k;
			}
			for (std::size_t m = 0; m < cert.members.size(); ++m) {
				auto &r = cert.members[m];
				std::string record_id = cert_id + "-" + std::to_string(m + 1);
				if (!r.entity.empty()) {
					corpus.entities.push_back({record_id, r.entity});
					certs_of_entity[r.entity].push_back(cert_id);
					++first_counts[r.first_name];
					++first_total;
				}
				std::string first = drop("first_name") ? "" : synth_detail::capitalize(corrupt_name(r.first_name));
				std::string last = drop("last_name") ? "" : synth_detail::capitalize(corrupt_name(r.last_name));
				std::string sex = drop("gender") ? "" : gender_text(r.gender);
				std::string age;
				if (r.age >= 0 && !drop("age")) {
					int a = r.age;
					if (chance(c.year_error)) {
						int k = std::uniform_int_distribution<int>(1, c.max_year_error)(rng_);
						a = std::max(0, a + (chance(0.5) ? k : -k));
					}
					age = age_text(a, std::uniform_int_distribution<int>(1, 11)(rng_));
				}
				std::string address = drop("address") ? "" : synth_detail::capitalize(r.address);
				std::string occupation = drop("occupation") ? "" : r.occupation;
				corpus.tables[cert.type].push_back({cert_id, std::to_string(year), r.role, record_id, first, last, sex,
				                                    age, address, occupation});
				++corpus.records;
			}
		}
		std::vector<std::size_t> counts;
		for (const auto &[name, k] : first_counts) {
			counts.push_back(k);
		}
		std::sort(counts.rbegin(), counts.rend());
		std::size_t top = 0;
		for (std::size_t i = 0; i < std::min<std::size_t>(5, counts.size()); ++i) {
			top += counts[i];
		}
		corpus.top5_first_name_share = first_total ? static_cast<double>(top) / static_cast<double>(first_total) : 0.0;

		std::set<std::tuple<std::string, std::string, std::string>> gold;
		for (auto &[entity, certs] : certs_of_entity) {
			std::sort(certs.begin(), certs.end());
			certs.erase(std::unique(certs.begin(), certs.end()), certs.end());
			for (std::size_t i = 0; i < certs.size(); ++i) {
				for (std::size_t j = i + 1; j < certs.size(); ++j) {
					auto a = text::to_lower(to_string(cert_type[certs[i]]));
					auto b = text::to_lower(to_string(cert_type[certs[j]]));
					if (b < a) {
						std::swap(a, b);
					}
					auto cat = a + "-" + b;
					if (cat != "birth-birth" && cat != "death-death") {
						gold.emplace(certs[i], certs[j], cat);
					}
				}
			}
		}
		corpus.gold.push_back({"cert_id_1", "cert_id_2", "link_type"});
		for (const auto &[a, b, cat] : gold) {
			corpus.gold.push_back({a, b, cat});
		}
		return corpus;
	}

	PopulationParams p_;
	std::mt19937_64 rng_;
	std::vector<double> female_w_;
	std::vector<double> male_w_;
	std::vector<double> surname_w_;
	std::vector<Person> people_;
	std::vector<RawCertificate> certs_;
};

inline SyntheticCorpus generate(const PopulationParams &params) { return PopulationSimulator(params).run(); }

} // namespace poplink
