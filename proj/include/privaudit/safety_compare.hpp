#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "privaudit/api_analysis.hpp"
#include "privaudit/manifest_analysis.hpp"
#include "privaudit/taxonomy.hpp"
#include "privaudit/ui_analysis.hpp"

namespace privaudit {

inline constexpr int kDeclarationSchemaVersion = 1;

struct DeclaredType {
    std::string type;
    std::set<Purpose> purposes;

    friend auto operator<=>(const DeclaredType&, const DeclaredType&) = default;
};

struct SecurityPractices {
    bool encrypted_in_transit = false;
    bool deletion_requestable = false;

    friend bool operator==(const SecurityPractices&, const SecurityPractices&) = default;
};

/// A snapshot of an app's data-safety section.
struct SafetyDeclaration {
    std::map<SafetyCategory, std::vector<DeclaredType>> collected;
    std::map<SafetyCategory, std::vector<DeclaredType>> shared;
    SecurityPractices security;
    bool claims_no_collection = false;
    bool claims_no_sharing = false;

    /// Parses and validates a snapshot. Throws malformed_declaration.
    static SafetyDeclaration from_json(const nlohmann::json& doc);
    static SafetyDeclaration load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    std::size_t total_declared_types() const;

    friend bool operator==(const SafetyDeclaration&, const SafetyDeclaration&) = default;
};

using EvidenceItem = std::variant<LabeledField, ApiSourceRecord, PermissionEvidence>;

std::string_view evidence_kind_name(const EvidenceItem& item); // "ui"/"api"/"permission"
std::string describe_evidence(const EvidenceItem& item);

/// Evidence routed to data-safety categories; items whose label has no
/// data-safety home land in unmappable and are never dropped.
struct CollectionEvidence {
    std::map<SafetyCategory, std::vector<EvidenceItem>> per_category;
    std::vector<EvidenceItem> unmappable;

    std::size_t total_items() const;
};

CollectionEvidence aggregate_evidence(std::span<const LabeledField> fields,
                                      std::span<const ApiSourceRecord> apis,
                                      std::span<const PermissionEvidence> permissions,
                                      const CategoryMapping& mapping);

enum class CategoryState {
    CollectedAndReported, // ⊛
    CollectedNotReported, // ★
    ReportedNotCollected, // ○
    Absent,
};

std::string_view category_state_name(CategoryState state);
std::string_view category_state_symbol(CategoryState state);

struct CategoryStatus {
    SafetyCategory category = SafetyCategory::Location;
    CategoryState state = CategoryState::Absent;
    std::vector<std::string> evidence_kinds; // which kinds back a collected mark

    friend bool operator==(const CategoryStatus&, const CategoryStatus&) = default;
};

enum class Verdict { OverReporting, UnderReporting, InconsistentReporting };

std::string_view verdict_name(Verdict verdict);

struct ComparisonReport {
    std::vector<CategoryStatus> statuses; // all 14 categories, enum order
    std::set<Verdict> verdicts;
    std::vector<std::string> inconsistencies;
    std::vector<std::string> unmappable_notes;
};

/// Over-reporting: all 14 categories declared, or more than half of the
/// declared data types carry >= 6 purposes. Under-reporting: a no-collection
/// claim or exactly one declared data type. Depends on the declaration only.
std::set<Verdict> declaration_verdict(const SafetyDeclaration& decl);

/// Flags: shared_without_collected, security_claims_without_data, and the
/// informational no_deletion_with_data.
std::vector<std::string> consistency_checks(const SafetyDeclaration& decl);

ComparisonReport compare(const SafetyDeclaration& decl, const CollectionEvidence& evidence);

} // namespace privaudit
