#pragma once

#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace poplink {

/// Names of the common attributes every record is mapped onto.
class AttributeSchema {
public:
	AttributeSchema() = default;
	explicit AttributeSchema(std::vector<std::string> names) : names_(std::move(names)) {
		for (std::size_t i = 0; i < names_.size(); ++i) {
			for (std::size_t j = 0; j < i; ++j) {
				if (names_[i] == names_[j]) {
					throw ConfigError("duplicate attribute '" + names_[i] + "'");
				}
			}
		}
	}

	static AttributeSchema standard() {
		return AttributeSchema(
		    {"first_name", "last_name", "gender", "age", "birth_year", "address", "occupation", "relationship"});
	}

	[[nodiscard]] std::size_t size() const { return names_.size(); }
	[[nodiscard]] const std::string &operator[](std::size_t i) const { return names_.at(i); }
	[[nodiscard]] const std::vector<std::string> &names() const { return names_; }

	[[nodiscard]] std::optional<std::size_t> find(std::string_view name) const {
		for (std::size_t i = 0; i < names_.size(); ++i) {
			if (names_[i] == name) {
				return i;
			}
		}
		return std::nullopt;
	}

	[[nodiscard]] std::size_t index_of(std::string_view name) const {
		if (auto i = find(name)) {
			return *i;
		}
		throw ConfigError("unknown attribute '" + std::string(name) + "'");
	}

	friend bool operator==(const AttributeSchema &, const AttributeSchema &) = default;

private:
	std::vector<std::string> names_;
};

/// A certificate with its member records, before indexing.
struct ParsedCertificate {
	Certificate header; // members left empty
	std::vector<IndividualRecord> records;
};

/// All records of all certificate types in one table. Certificates are kept
/// in certificate_id order and records in record_id order, so index order is
/// the canonical id order used throughout the pipeline. Immutable once built.
class RecordStore {
public:
	RecordStore() = default;

	static RecordStore build(AttributeSchema schema, RoleVocabulary vocabulary, std::vector<ParsedCertificate> parsed) {
		RecordStore s;
		s.schema_ = std::move(schema);
		s.vocabulary_ = std::move(vocabulary);

		std::sort(parsed.begin(), parsed.end(), [](const ParsedCertificate &a, const ParsedCertificate &b) {
			return a.header.certificate_id < b.header.certificate_id;
		});
		for (std::size_t i = 1; i < parsed.size(); ++i) {
			if (parsed[i].header.certificate_id == parsed[i - 1].header.certificate_id) {
				throw IntegrityError("duplicate certificate id '" + parsed[i].header.certificate_id + "'");
			}
		}

		struct Pending {
			IndividualRecord record;
			CertificateIndex cert;
		};
		std::vector<Pending> pending;
		for (std::size_t c = 0; c < parsed.size(); ++c) {
			auto &pc = parsed[c];
			if (pc.records.empty()) {
				throw IntegrityError("certificate '" + pc.header.certificate_id + "' has no members");
			}
			for (auto &r : pc.records) {
				if (r.role >= s.vocabulary_.size() ||
				    s.vocabulary_[r.role].certificate_type != pc.header.type) {
					throw IntegrityError("record '" + r.record_id + "' has a role that does not belong to " +
					                     std::string(to_string(pc.header.type)) + " certificates");
				}
				r.certificate_id = pc.header.certificate_id;
				r.attributes.resize(s.schema_.size());
				pending.push_back({std::move(r), static_cast<CertificateIndex>(c)});
			}
			pc.header.members.clear();
			s.certificates_.push_back(std::move(pc.header));
		}
		std::sort(pending.begin(), pending.end(),
		          [](const Pending &a, const Pending &b) { return a.record.record_id < b.record.record_id; });
		for (std::size_t i = 1; i < pending.size(); ++i) {
			if (pending[i].record.record_id == pending[i - 1].record.record_id) {
				throw IntegrityError("duplicate record id '" + pending[i].record.record_id + "'");
			}
		}
		s.records_.reserve(pending.size());
		s.record_certificate_.reserve(pending.size());
		for (std::size_t i = 0; i < pending.size(); ++i) {
			s.certificates_[pending[i].cert].members.push_back(static_cast<RecordIndex>(i));
			s.record_certificate_.push_back(pending[i].cert);
			s.records_.push_back(std::move(pending[i].record));
		}
		s.by_role_.assign(s.vocabulary_.size(), {});
		for (std::size_t i = 0; i < s.records_.size(); ++i) {
			s.by_role_[s.records_[i].role].push_back(static_cast<RecordIndex>(i));
		}
		for (std::size_t c = 0; c < s.certificates_.size(); ++c) {
			s.certificate_index_.emplace(s.certificates_[c].certificate_id, static_cast<CertificateIndex>(c));
		}
		for (std::size_t r = 0; r < s.records_.size(); ++r) {
			s.record_index_.emplace(s.records_[r].record_id, static_cast<RecordIndex>(r));
		}
		return s;
	}

	[[nodiscard]] const AttributeSchema &schema() const { return schema_; }
	[[nodiscard]] const RoleVocabulary &vocabulary() const { return vocabulary_; }

	[[nodiscard]] std::size_t record_count() const { return records_.size(); }
	[[nodiscard]] std::size_t certificate_count() const { return certificates_.size(); }

	[[nodiscard]] const IndividualRecord &record(RecordIndex r) const { return records_.at(r); }
	[[nodiscard]] const Certificate &certificate(CertificateIndex c) const { return certificates_.at(c); }
	[[nodiscard]] const std::vector<IndividualRecord> &records() const { return records_; }
	[[nodiscard]] const std::vector<Certificate> &certificates() const { return certificates_; }

	[[nodiscard]] CertificateIndex certificate_of(RecordIndex r) const { return record_certificate_.at(r); }
	[[nodiscard]] int event_year(RecordIndex r) const { return certificates_[record_certificate_.at(r)].event_year; }
	[[nodiscard]] CertificateType certificate_type_of(RecordIndex r) const {
		return certificates_[record_certificate_.at(r)].type;
	}

	[[nodiscard]] const std::vector<RecordIndex> &records_with_role(RoleId role) const { return by_role_.at(role); }

	[[nodiscard]] std::optional<RecordIndex> find_record(std::string_view id) const {
		auto it = record_index_.find(std::string(id));
		if (it == record_index_.end()) {
			return std::nullopt;
		}
		return it->second;
	}

	[[nodiscard]] std::optional<CertificateIndex> find_certificate(std::string_view id) const {
		auto it = certificate_index_.find(std::string(id));
		if (it == certificate_index_.end()) {
			return std::nullopt;
		}
		return it->second;
	}

	[[nodiscard]] const std::optional<std::string> &value(RecordIndex r, std::size_t attribute) const {
		return records_[r].attributes[attribute];
	}

	[[nodiscard]] SegmentEntry segment_entry(RecordIndex r) const {
		auto c = record_certificate_.at(r);
		return {r, c, certificates_[c].event_year, records_[r].role};
	}

	/// Attach gold entity ids (record_id -> entity_id); unknown record ids are ignored.
	void attach_entities(const std::unordered_map<std::string, std::string> &entities) {
		for (auto &r : records_) {
			if (auto it = entities.find(r.record_id); it != entities.end()) {
				r.entity_id = it->second;
			}
		}
	}

	[[nodiscard]] bool has_entities() const {
		return std::any_of(records_.begin(), records_.end(), [](const auto &r) { return r.entity_id.has_value(); });
	}

private:
	AttributeSchema schema_;
	RoleVocabulary vocabulary_;
	std::vector<Certificate> certificates_;
	std::vector<IndividualRecord> records_;
	std::vector<CertificateIndex> record_certificate_;
	std::vector<std::vector<RecordIndex>> by_role_;
	std::unordered_map<std::string, CertificateIndex> certificate_index_;
	std::unordered_map<std::string, RecordIndex> record_index_;
};

} // namespace poplink
