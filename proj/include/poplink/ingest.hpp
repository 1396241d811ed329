#pragma once

#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/io.hpp"
#include "poplink/record_store.hpp"
#include "poplink/text.hpp"

#include <cmath>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace poplink {

/// Editable normalization tables for transcription conventions.
struct CleaningRules {
	std::map<std::string, std::string> gender_aliases;
	/// unit spelling -> units per year ("months" -> 12)
	std::map<std::string, double> age_units;

	static CleaningRules standard() {
		CleaningRules r;
		for (const char *f : {"f", "female", "fem", "woman", "girl", "w"}) {
			r.gender_aliases[f] = "f";
		}
		for (const char *m : {"m", "male", "man", "boy"}) {
			r.gender_aliases[m] = "m";
		}
		for (const char *y : {"y", "yr", "yrs", "year", "years"}) {
			r.age_units[y] = 1.0;
		}
		for (const char *mo : {"m", "mo", "mos", "mth", "mths", "month", "months"}) {
			r.age_units[mo] = 12.0;
		}
		for (const char *w : {"w", "wk", "wks", "week", "weeks"}) {
			r.age_units[w] = 52.0;
		}
		for (const char *d : {"d", "dy", "day", "days"}) {
			r.age_units[d] = 365.0;
		}
		for (const char *h : {"h", "hr", "hrs", "hour", "hours"}) {
			r.age_units[h] = 8760.0;
		}
		return r;
	}
};

namespace ingest_detail {

inline std::string basic_clean(std::string_view input) {
	auto raw = text::to_ascii(input);
	std::string out;
	out.reserve(raw.size());
	bool pending_space = false;
	for (char c : raw) {
		auto u = static_cast<unsigned char>(c);
		bool space = false;
		if (u < 0x20 || u == 0x7F) {
			space = (c == '\t' || c == '\n' || c == '\r');
			if (!space) {
				continue;
			}
		} else if (c == ' ' || c == '-' || c == '/' || c == ',' || c == '&' || c == '+' || c == ';') {
			space = true;
		} else if (!std::isalnum(u)) {
			continue; // other punctuation is stripped
		}
		if (space) {
			pending_space = !out.empty();
			continue;
		}
		if (pending_space) {
			out.push_back(' ');
			pending_space = false;
		}
		out.push_back(text::ascii_lower(c));
	}
	return out;
}

inline std::optional<std::string> clean_age(std::string_view cleaned, const CleaningRules &rules) {
	std::size_t i = 0;
	while (i < cleaned.size() && std::isdigit(static_cast<unsigned char>(cleaned[i]))) {
		++i;
	}
	if (i == 0) {
		return std::nullopt;
	}
	double value = static_cast<double>(std::stoll(std::string(cleaned.substr(0, i))));
	auto unit = text::trim(cleaned.substr(i));
	double per_year = 1.0;
	if (!unit.empty()) {
		auto it = rules.age_units.find(std::string(unit));
		if (it == rules.age_units.end()) {
			// "3 months old", "2 yrs 6 mo": first word decides
			auto space = unit.find(' ');
			it = rules.age_units.find(std::string(unit.substr(0, space)));
			if (it == rules.age_units.end()) {
				return std::nullopt;
			}
		}
		per_year = it->second;
	}
	if (per_year <= 0.0) {
		return std::nullopt;
	}
	auto years = static_cast<long long>(std::floor(value / per_year));
	return std::to_string(years);
}

} // namespace ingest_detail

/// Normalize one raw attribute value. Never fails: values that cannot be
/// normalized come back absent.
inline std::optional<std::string> clean_value(std::string_view attribute, std::string_view raw,
                                              const CleaningRules &rules = CleaningRules::standard()) {
	auto cleaned = ingest_detail::basic_clean(raw);
	if (cleaned.empty()) {
		return std::nullopt;
	}
	if (attribute == "gender") {
		auto it = rules.gender_aliases.find(cleaned);
		if (it == rules.gender_aliases.end()) {
			return std::nullopt;
		}
		return it->second;
	}
	if (attribute == "age") {
		return ingest_detail::clean_age(cleaned, rules);
	}
	if (attribute == "birth_year") {
		auto y = text::parse_int(cleaned);
		if (!y) {
			return std::nullopt;
		}
		return std::to_string(*y);
	}
	return cleaned;
}

/// Birth year from an age at an event; negative ages are rejected.
inline std::optional<int> impute_birth_year(int event_year, int age) {
	if (age < 0) {
		return std::nullopt;
	}
	return event_year - age;
}

/// Source column -> common attribute, per certificate type and role. Role
/// "*" applies to every role of the type. Columns named like a common
/// attribute map onto it unless overridden.
class MappingSchema {
public:
	void map(CertificateType type, std::string role, std::string column, std::string attribute) {
		entries_[{type, std::move(role)}][std::move(column)] = std::move(attribute);
	}

	void validate(const AttributeSchema &schema) const {
		for (const auto &[key, cols] : entries_) {
			for (const auto &[col, attr] : cols) {
				if (!schema.find(attr)) {
					throw ConfigError("mapping for column '" + col + "' targets unknown attribute '" + attr + "'");
				}
			}
		}
	}

	/// Attribute index for `column` of a record with `role`, or none.
	[[nodiscard]] std::optional<std::size_t> target(CertificateType type, std::string_view role, std::string_view column,
	                                                const AttributeSchema &schema) const {
		for (const auto &key : {std::pair<CertificateType, std::string>{type, std::string(role)},
		                        std::pair<CertificateType, std::string>{type, "*"}}) {
			if (auto it = entries_.find(key); it != entries_.end()) {
				if (auto c = it->second.find(std::string(column)); c != it->second.end()) {
					return schema.find(c->second);
				}
			}
		}
		return schema.find(column);
	}

private:
	std::map<std::pair<CertificateType, std::string>, std::map<std::string, std::string>> entries_;
};

struct IngestOptions {
	std::set<std::string> drop_roles{"Informant"};
	CleaningRules rules = CleaningRules::standard();
};

struct IngestReport {
	std::size_t rows_read = 0;
	std::size_t rows_accepted = 0;
	std::size_t rows_dropped_role = 0;
	std::size_t rejected_event_year = 0;
	std::size_t rejected_unknown_role = 0;
	std::size_t rejected_missing_id = 0;
	std::size_t rejected_year_conflict = 0;
	std::size_t rejected_duplicate_record = 0;
	std::size_t certificates = 0;
	std::size_t records = 0;

	[[nodiscard]] std::size_t rows_rejected() const {
		return rejected_event_year + rejected_unknown_role + rejected_missing_id + rejected_year_conflict +
		       rejected_duplicate_record;
	}

	IngestReport &operator+=(const IngestReport &o) {
		rows_read += o.rows_read;
		rows_accepted += o.rows_accepted;
		rows_dropped_role += o.rows_dropped_role;
		rejected_event_year += o.rejected_event_year;
		rejected_unknown_role += o.rejected_unknown_role;
		rejected_missing_id += o.rejected_missing_id;
		rejected_year_conflict += o.rejected_year_conflict;
		rejected_duplicate_record += o.rejected_duplicate_record;
		certificates += o.certificates;
		records += o.records;
		return *this;
	}

	[[nodiscard]] std::string to_text(std::string_view prefix = "") const {
		std::ostringstream ss;
		auto kv = [&](std::string_view k, std::size_t v) { ss << prefix << k << '=' << v << '\n'; };
		kv("rows_read", rows_read);
		kv("rows_accepted", rows_accepted);
		kv("rows_dropped_role", rows_dropped_role);
		kv("rows_rejected", rows_rejected());
		kv("rejected_event_year", rejected_event_year);
		kv("rejected_unknown_role", rejected_unknown_role);
		kv("rejected_missing_id", rejected_missing_id);
		kv("rejected_year_conflict", rejected_year_conflict);
		kv("rejected_duplicate_record", rejected_duplicate_record);
		kv("certificates", certificates);
		kv("records", records);
		return ss.str();
	}
};

struct IngestContext {
	const AttributeSchema &schema;
	const RoleVocabulary &vocabulary;
	const MappingSchema &mapping;
	const IngestOptions &options;
};

/// Parse one certificate CSV: a header row, then one row per individual with
/// certificate_id, event_year and role columns. Rows are grouped by
/// certificate_id; bad rows are counted in `report` and skipped.
inline std::vector<ParsedCertificate> parse_certificates(std::istream &in, CertificateType type,
                                                         const IngestContext &ctx, IngestReport &report) {
	io::CsvReader reader(in);
	io::Row header;
	if (!reader.next(header)) {
		throw SchemaError("empty certificate file (no header row)");
	}
	for (auto &h : header) {
		h = std::string(text::trim(h));
	}
	if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) {
		header[0].erase(0, 3);
	}
	auto column = [&](std::string_view name) -> std::optional<std::size_t> {
		for (std::size_t i = 0; i < header.size(); ++i) {
			if (header[i] == name) {
				return i;
			}
		}
		return std::nullopt;
	};
	auto require = [&](std::string_view name) {
		if (auto c = column(name)) {
			return *c;
		}
		throw SchemaError("missing mandatory column '" + std::string(name) + "'");
	};
	const std::size_t col_cert = require("certificate_id");
	const std::size_t col_year = require("event_year");
	const std::size_t col_role = require("role");
	const auto col_record = column("record_id");
	const auto col_entity = column("entity_id");
	const auto age_attr = ctx.schema.find("age");
	const auto birth_attr = ctx.schema.find("birth_year");

	std::vector<ParsedCertificate> out;
	std::unordered_map<std::string, std::size_t> by_id;
	std::set<std::string> seen_records;
	io::Row row;
	while (reader.next(row)) {
		if (row.size() == 1 && text::trim(row[0]).empty()) {
			continue;
		}
		++report.rows_read;
		row.resize(header.size());
		std::string cert_id(text::trim(row[col_cert]));
		if (cert_id.empty() || cert_id.find_first_of("\t\n\r") != std::string::npos) {
			++report.rejected_missing_id;
			continue;
		}
		auto year = text::parse_int(row[col_year]);
		if (!year) {
			++report.rejected_event_year;
			continue;
		}
		std::string role_name(text::trim(row[col_role]));
		if (ctx.options.drop_roles.count(role_name)) {
			++report.rows_dropped_role;
			continue;
		}
		auto role = ctx.vocabulary.find(type, role_name);
		if (!role) {
			++report.rejected_unknown_role;
			continue;
		}

		auto [it, inserted] = by_id.try_emplace(cert_id, out.size());
		if (inserted) {
			ParsedCertificate pc;
			pc.header.certificate_id = cert_id;
			pc.header.type = type;
			pc.header.event_year = *year;
			out.push_back(std::move(pc));
		} else if (out[it->second].header.event_year != *year) {
			++report.rejected_year_conflict;
			continue;
		}
		auto &pc = out[it->second];

		IndividualRecord rec;
		if (col_record && !text::trim(row[*col_record]).empty()) {
			rec.record_id = std::string(text::trim(row[*col_record]));
		} else {
			rec.record_id = cert_id + "." + std::to_string(pc.records.size() + 1);
		}
		if (rec.record_id.find_first_of("\t\n\r") != std::string::npos) {
			++report.rejected_missing_id;
			continue;
		}
		if (!seen_records.insert(rec.record_id).second) {
			++report.rejected_duplicate_record;
			continue;
		}
		if (col_entity && !text::trim(row[*col_entity]).empty()) {
			rec.entity_id = std::string(text::trim(row[*col_entity]));
		}
		rec.role = *role;
		rec.attributes.assign(ctx.schema.size(), std::nullopt);
		for (std::size_t c = 0; c < header.size(); ++c) {
			if (c == col_cert || c == col_year || c == col_role || c == col_record || c == col_entity) {
				continue;
			}
			auto attr = ctx.mapping.target(type, role_name, header[c], ctx.schema);
			if (!attr) {
				continue;
			}
			auto v = clean_value(ctx.schema[*attr], row[c], ctx.options.rules);
			if (v) {
				rec.attributes[*attr] = std::move(v);
			}
		}
		if (age_attr && birth_attr && !rec.attributes[*birth_attr] && rec.attributes[*age_attr]) {
			if (auto age = text::parse_int(*rec.attributes[*age_attr])) {
				if (auto by = impute_birth_year(*year, *age)) {
					rec.attributes[*birth_attr] = std::to_string(*by);
				}
			}
		}
		pc.records.push_back(std::move(rec));
		++report.rows_accepted;
	}
	report.certificates += out.size();
	for (const auto &pc : out) {
		report.records += pc.records.size();
	}
	return out;
}

inline std::vector<ParsedCertificate> parse_certificates(const std::filesystem::path &path, CertificateType type,
                                                         const IngestContext &ctx, IngestReport &report) {
	auto in = io::open_in(path);
	try {
		return parse_certificates(in, type, ctx, report);
	} catch (const SchemaError &e) {
		throw SchemaError(path.string() + ": " + e.what());
	}
}

struct IngestResult {
	RecordStore store;
	std::map<CertificateType, IngestReport> per_type;
	IngestReport total;

	[[nodiscard]] std::string report_text() const {
		std::string s = total.to_text("total.");
		for (const auto &[t, r] : per_type) {
			s += r.to_text(text::to_lower(to_string(t)) + ".");
		}
		return s;
	}
};

/// Parse every configured file (concurrently, one task per file) and
/// assemble the frozen record store.
inline IngestResult ingest_files(const std::map<CertificateType, std::filesystem::path> &files,
                                 const IngestContext &ctx) {
	struct Batch {
		CertificateType type;
		std::future<std::pair<std::vector<ParsedCertificate>, IngestReport>> result;
	};
	std::vector<Batch> batches;
	for (const auto &[type, path] : files) {
		batches.push_back({type, std::async(std::launch::async, [type = type, path = path, &ctx] {
			                   IngestReport rep;
			                   auto certs = parse_certificates(path, type, ctx, rep);
			                   return std::make_pair(std::move(certs), rep);
		                   })});
	}
	IngestResult result;
	std::vector<ParsedCertificate> all;
	for (auto &b : batches) {
		auto [certs, rep] = b.result.get();
		result.per_type[b.type] = rep;
		result.total += rep;
		for (auto &c : certs) {
			all.push_back(std::move(c));
		}
	}
	result.store = RecordStore::build(ctx.schema, ctx.vocabulary, std::move(all));
	return result;
}

// Canonical store file ------------------------------------------------------

inline void write_store_tsv(const RecordStore &store, std::ostream &out) {
	std::vector<std::string> header = {"record_id", "certificate_id", "cert_type", "event_year", "role", "entity_id"};
	for (const auto &a : store.schema().names()) {
		header.push_back(a);
	}
	io::write_row(out, header);
	std::vector<std::string> row;
	for (RecordIndex r = 0; r < store.record_count(); ++r) {
		const auto &rec = store.record(r);
		const auto &cert = store.certificate(store.certificate_of(r));
		row = {rec.record_id,
		       cert.certificate_id,
		       std::string(to_string(cert.type)),
		       std::to_string(cert.event_year),
		       store.vocabulary()[rec.role].name,
		       rec.entity_id.value_or("")};
		for (const auto &v : rec.attributes) {
			row.push_back(v.value_or(""));
		}
		io::write_row(out, row);
	}
}

inline RecordStore read_store_tsv(const std::filesystem::path &path, const AttributeSchema &schema,
                                  const RoleVocabulary &vocabulary) {
	auto rows = io::read_tsv(path);
	if (rows.empty()) {
		throw SchemaError(path.string() + ": empty store file");
	}
	const auto &header = rows[0];
	if (header.size() != 6 + schema.size()) {
		throw SchemaError(path.string() + ": store columns do not match the attribute schema");
	}
	for (std::size_t i = 0; i < schema.size(); ++i) {
		if (header[6 + i] != schema[i]) {
			throw SchemaError(path.string() + ": unexpected attribute column '" + header[6 + i] + "'");
		}
	}
	std::vector<ParsedCertificate> certs;
	std::unordered_map<std::string, std::size_t> by_id;
	for (std::size_t i = 1; i < rows.size(); ++i) {
		auto row = rows[i];
		row.resize(header.size());
		auto type = parse_certificate_type(row[2]);
		auto year = text::parse_int(row[3]);
		if (!type || !year) {
			throw SchemaError(path.string() + ": bad certificate type or year on line " + std::to_string(i + 1));
		}
		auto role = vocabulary.find(*type, row[4]);
		if (!role) {
			throw SchemaError(path.string() + ": unknown role '" + row[4] + "'");
		}
		auto [it, inserted] = by_id.try_emplace(row[1], certs.size());
		if (inserted) {
			ParsedCertificate pc;
			pc.header.certificate_id = row[1];
			pc.header.type = *type;
			pc.header.event_year = *year;
			certs.push_back(std::move(pc));
		}
		IndividualRecord rec;
		rec.record_id = row[0];
		rec.role = *role;
		if (!row[5].empty()) {
			rec.entity_id = row[5];
		}
		rec.attributes.resize(schema.size());
		for (std::size_t a = 0; a < schema.size(); ++a) {
			if (!row[6 + a].empty()) {
				rec.attributes[a] = row[6 + a];
			}
		}
		certs[it->second].records.push_back(std::move(rec));
	}
	return RecordStore::build(schema, vocabulary, std::move(certs));
}

/// record_id -> entity_id from a two-column TSV (header row expected).
inline std::unordered_map<std::string, std::string> read_entity_registry(const std::filesystem::path &path) {
	std::unordered_map<std::string, std::string> out;
	auto rows = io::read_tsv(path);
	for (std::size_t i = 1; i < rows.size(); ++i) {
		if (rows[i].size() >= 2) {
			out[rows[i][0]] = rows[i][1];
		}
	}
	return out;
}

} // namespace poplink
