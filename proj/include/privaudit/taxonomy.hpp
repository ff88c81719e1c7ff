#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privaudit/errors.hpp"

namespace privaudit {

/// Privacy-relevance tiers, ordered by risk. Tier values double as the
/// numeric risk rank (1 = most severe).
enum class PrivacyRelevance : std::uint8_t {
    DirectlyIdentifiable = 1,
    PartiallyIdentifiable = 2,
    AccessData = 3,
    ContextDependent = 4,
};

/// Numeric risk rank in 1..4; bijective with PrivacyRelevance.
struct RiskRank {
    int value = 0;

    friend auto operator<=>(const RiskRank&, const RiskRank&) = default;
};

RiskRank make_rank(int value); // throws invalid_rank unless 1..4
RiskRank rank_of(PrivacyRelevance tier);
PrivacyRelevance tier_of(RiskRank rank);

/// Data categories across all four tiers. A category may be admissible at
/// more than one rank (e.g. personal information at ranks 1 and 2); the
/// (rank, category) admission table decides validity.
enum class DataCategory : std::uint8_t {
    PersonalInformation,
    DeviceOrOtherIds,
    FinancialInformation,
    LocationData,
    DeviceData,
    AudioData,
    BrowsingData,
    AppActivity,
    PhotosAndVideos,
    SessionData,
    CalendarData,
    HealthAndFitnessData,
    ContactsData,
    MessagesData,
    Authentication,
    EmailAuthentication,
    NetworkAuthentication,
    PaymentAuthentication,
    Message,
    Ui,
    Audio,
    Email,
};

inline constexpr std::size_t kDataCategoryCount = 22;

/// The pair attached to every detected data source.
struct PrivacyLabel {
    RiskRank rank;
    DataCategory category = DataCategory::PersonalInformation;

    friend auto operator<=>(const PrivacyLabel&, const PrivacyLabel&) = default;
};

/// Refines a PrivacyLabel ("Name", "Password", "IP Address", ...).
/// Normalized: trimmed, internal whitespace collapsed to single spaces.
struct IdentifierTag {
    std::string name;

    friend auto operator<=>(const IdentifierTag&, const IdentifierTag&) = default;
};

IdentifierTag make_identifier(std::string_view raw); // throws empty_identifier

bool admissible(RiskRank rank, DataCategory category);
std::span<const DataCategory> categories_for_rank(RiskRank rank);

/// Makes a validated label; throws invalid_rank_category_pair for pairs
/// outside the admission table.
PrivacyLabel make_label(int rank, DataCategory category);

/// All 24 admissible (rank, category) pairs, rank-major order.
std::span<const PrivacyLabel> admissible_labels();

/// Whether the (rank, category) row is one of the documented extensions
/// (health/contacts/messages at rank 2) rather than a base table row.
bool is_extension_pair(RiskRank rank, DataCategory category);

/// The 14 Google Play data-safety categories.
enum class SafetyCategory : std::uint8_t {
    Location,
    PersonalInfo,
    FinancialInfo,
    HealthAndFitness,
    Messages,
    PhotosAndVideos,
    Audio,
    FilesAndDocs,
    Calendar,
    Contacts,
    AppActivity,
    WebBrowsing,
    AppInfoAndPerformance,
    DeviceOrOtherIds,
};

inline constexpr std::size_t kSafetyCategoryCount = 14;
std::span<const SafetyCategory> all_safety_categories();

/// The 7 data-safety purposes.
enum class Purpose : std::uint8_t {
    AppFunctionality,
    Analytics,
    DeveloperCommunications,
    Advertising,
    FraudPreventionSecurityCompliance,
    Personalization,
    AccountManagement,
};

inline constexpr std::size_t kPurposeCount = 7;
std::span<const Purpose> all_purposes();

// Stable machine names (lower_snake tokens) used in all file formats and
// reports, plus human-readable display names.
std::string_view machine_name(DataCategory category);
std::string_view machine_name(SafetyCategory category);
std::string_view machine_name(Purpose purpose);
std::string_view display_name(SafetyCategory category);
std::string_view display_name(Purpose purpose);

std::optional<DataCategory> data_category_from_machine_name(std::string_view name);
std::optional<SafetyCategory> safety_category_from_machine_name(std::string_view name);
std::optional<Purpose> purpose_from_machine_name(std::string_view name);

/// Relevance prefix phrase ("Directly identifiable", "Access", ...).
std::string_view relevance_phrase(RiskRank rank);

/// Category phrase as it appears in label text ("financial information",
/// "payment authentication data", "UI data"). Rank-dependent because some
/// phrases repeat across tiers.
std::string_view category_phrase(RiskRank rank, DataCategory category);

struct ParsedLabel {
    PrivacyLabel label;
    IdentifierTag identifier;
};

/// Parses "<relevance phrase> <category phrase> -> <identifier>"
/// case-insensitively on the phrases. Throws unknown_relevance,
/// invalid_rank_category_pair or empty_identifier.
ParsedLabel parse_label(std::string_view text);

/// Inverse of parse_label over valid pairs.
std::string format_label(const PrivacyLabel& label, const IdentifierTag& identifier);

} // namespace privaudit
