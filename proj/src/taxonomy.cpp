#include "privaudit/taxonomy.hpp"

#include <algorithm>
#include <cctype>

namespace privaudit {

namespace {

std::string collapse_spaces(std::string_view raw)
{
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

constexpr std::array<DataCategory, 3> kRank1Categories = {
        DataCategory::PersonalInformation,
        DataCategory::DeviceOrOtherIds,
        DataCategory::FinancialInformation,
};

constexpr std::array<DataCategory, 12> kRank2Categories = {
        DataCategory::PersonalInformation,
        DataCategory::LocationData,
        DataCategory::DeviceData,
        DataCategory::AudioData,
        DataCategory::BrowsingData,
        DataCategory::AppActivity,
        DataCategory::PhotosAndVideos,
        DataCategory::SessionData,
        DataCategory::CalendarData,
        DataCategory::HealthAndFitnessData,
        DataCategory::ContactsData,
        DataCategory::MessagesData,
};

constexpr std::array<DataCategory, 4> kRank3Categories = {
        DataCategory::Authentication,
        DataCategory::EmailAuthentication,
        DataCategory::NetworkAuthentication,
        DataCategory::PaymentAuthentication,
};

constexpr std::array<DataCategory, 5> kRank4Categories = {
        DataCategory::Message,
        DataCategory::Ui,
        DataCategory::Audio,
        DataCategory::PhotosAndVideos,
        DataCategory::Email,
};

struct CategoryNames {
    DataCategory category;
    std::string_view machine;
    std::string_view phrase;
};

constexpr std::array<CategoryNames, kDataCategoryCount> kCategoryNames = {{
        {DataCategory::PersonalInformation, "personal_information", "personal information"},
        {DataCategory::DeviceOrOtherIds, "device_or_other_ids", "device or other IDs"},
        {DataCategory::FinancialInformation, "financial_information", "financial information"},
        {DataCategory::LocationData, "location_data", "location data"},
        {DataCategory::DeviceData, "device_data", "device data"},
        {DataCategory::AudioData, "audio_data", "audio data"},
        {DataCategory::BrowsingData, "browsing_data", "browsing data"},
        {DataCategory::AppActivity, "app_activity", "app activity"},
        {DataCategory::PhotosAndVideos, "photos_and_videos", "photos and videos"},
        {DataCategory::SessionData, "session_data", "session data"},
        {DataCategory::CalendarData, "calendar_data", "calendar data"},
        {DataCategory::HealthAndFitnessData, "health_and_fitness_data", "health and fitness data"},
        {DataCategory::ContactsData, "contacts_data", "contacts data"},
        {DataCategory::MessagesData, "messages_data", "messages data"},
        {DataCategory::Authentication, "authentication", "authentication data"},
        {DataCategory::EmailAuthentication, "email_authentication", "email authentication data"},
        {DataCategory::NetworkAuthentication, "network_authentication", "network authentication data"},
        {DataCategory::PaymentAuthentication, "payment_authentication", "payment authentication data"},
        {DataCategory::Message, "message", "message data"},
        {DataCategory::Ui, "ui", "UI data"},
        {DataCategory::Audio, "audio", "audio data"},
        {DataCategory::Email, "email", "email data"},
}};

struct SafetyNames {
    SafetyCategory category;
    std::string_view machine;
    std::string_view display;
};

constexpr std::array<SafetyNames, kSafetyCategoryCount> kSafetyNames = {{
        {SafetyCategory::Location, "location", "Location"},
        {SafetyCategory::PersonalInfo, "personal_info", "Personal info"},
        {SafetyCategory::FinancialInfo, "financial_info", "Financial info"},
        {SafetyCategory::HealthAndFitness, "health_and_fitness", "Health and fitness"},
        {SafetyCategory::Messages, "messages", "Messages"},
        {SafetyCategory::PhotosAndVideos, "photos_and_videos", "Photos and videos"},
        {SafetyCategory::Audio, "audio", "Audio"},
        {SafetyCategory::FilesAndDocs, "files_and_docs", "Files and docs"},
        {SafetyCategory::Calendar, "calendar", "Calendar"},
        {SafetyCategory::Contacts, "contacts", "Contacts"},
        {SafetyCategory::AppActivity, "app_activity", "App activity"},
        {SafetyCategory::WebBrowsing, "web_browsing", "Web browsing"},
        {SafetyCategory::AppInfoAndPerformance, "app_info_and_performance", "App info and performance"},
        {SafetyCategory::DeviceOrOtherIds, "device_or_other_ids", "Device or other IDs"},
}};

struct PurposeNames {
    Purpose purpose;
    std::string_view machine;
    std::string_view display;
};

constexpr std::array<PurposeNames, kPurposeCount> kPurposeNames = {{
        {Purpose::AppFunctionality, "app_functionality", "App functionality"},
        {Purpose::Analytics, "analytics", "Analytics"},
        {Purpose::DeveloperCommunications, "developer_communications", "Developer communications"},
        {Purpose::Advertising, "advertising", "Advertising or marketing"},
        {Purpose::FraudPreventionSecurityCompliance, "fraud_prevention_security_compliance",
         "Fraud prevention, security, and compliance"},
        {Purpose::Personalization, "personalization", "Personalization"},
        {Purpose::AccountManagement, "account_management", "Account management"},
}};

const std::vector<PrivacyLabel>& admissible_label_list()
{
    static const std::vector<PrivacyLabel> labels = [] {
        std::vector<PrivacyLabel> out;
        for (int rank = 1; rank <= 4; ++rank) {
            for (DataCategory cat : categories_for_rank(RiskRank{rank})) {
                out.push_back(PrivacyLabel{RiskRank{rank}, cat});
            }
        }
        return out;
    }();
    return labels;
}

} // namespace

RiskRank make_rank(int value)
{
    if (value < 1 || value > 4) {
        raise(errc::invalid_rank, "risk rank must be in 1..4, got " + std::to_string(value));
    }
    return RiskRank{value};
}

RiskRank rank_of(PrivacyRelevance tier)
{
    return RiskRank{static_cast<int>(tier)};
}

PrivacyRelevance tier_of(RiskRank rank)
{
    make_rank(rank.value);
    return static_cast<PrivacyRelevance>(rank.value);
}

IdentifierTag make_identifier(std::string_view raw)
{
    std::string normalized = collapse_spaces(raw);
    if (normalized.empty()) {
        raise(errc::empty_identifier, "identifier must be non-empty");
    }
    return IdentifierTag{std::move(normalized)};
}

std::span<const DataCategory> categories_for_rank(RiskRank rank)
{
    switch (rank.value) {
    case 1:
        return kRank1Categories;
    case 2:
        return kRank2Categories;
    case 3:
        return kRank3Categories;
    case 4:
        return kRank4Categories;
    default:
        raise(errc::invalid_rank, "risk rank must be in 1..4, got " + std::to_string(rank.value));
    }
}

bool admissible(RiskRank rank, DataCategory category)
{
    if (rank.value < 1 || rank.value > 4) {
        return false;
    }
    auto cats = categories_for_rank(rank);
    return std::find(cats.begin(), cats.end(), category) != cats.end();
}

PrivacyLabel make_label(int rank, DataCategory category)
{
    RiskRank r = make_rank(rank);
    if (!admissible(r, category)) {
        raise(errc::invalid_rank_category_pair,
              "category '" + std::string(machine_name(category)) + "' is not admissible at rank "
                      + std::to_string(rank));
    }
    return PrivacyLabel{r, category};
}

std::span<const PrivacyLabel> admissible_labels()
{
    return admissible_label_list();
}

bool is_extension_pair(RiskRank rank, DataCategory category)
{
    return rank.value == 2
            && (category == DataCategory::HealthAndFitnessData
                || category == DataCategory::ContactsData
                || category == DataCategory::MessagesData);
}

std::span<const SafetyCategory> all_safety_categories()
{
    static const std::array<SafetyCategory, kSafetyCategoryCount> cats = [] {
        std::array<SafetyCategory, kSafetyCategoryCount> out{};
        for (std::size_t i = 0; i < kSafetyCategoryCount; ++i) {
            out[i] = kSafetyNames[i].category;
        }
        return out;
    }();
    return cats;
}

std::span<const Purpose> all_purposes()
{
    static const std::array<Purpose, kPurposeCount> purposes = [] {
        std::array<Purpose, kPurposeCount> out{};
        for (std::size_t i = 0; i < kPurposeCount; ++i) {
            out[i] = kPurposeNames[i].purpose;
        }
        return out;
    }();
    return purposes;
}

std::string_view machine_name(DataCategory category)
{
    return kCategoryNames[static_cast<std::size_t>(category)].machine;
}

std::string_view machine_name(SafetyCategory category)
{
    return kSafetyNames[static_cast<std::size_t>(category)].machine;
}

std::string_view machine_name(Purpose purpose)
{
    return kPurposeNames[static_cast<std::size_t>(purpose)].machine;
}

std::string_view display_name(SafetyCategory category)
{
    return kSafetyNames[static_cast<std::size_t>(category)].display;
}

std::string_view display_name(Purpose purpose)
{
    return kPurposeNames[static_cast<std::size_t>(purpose)].display;
}

std::optional<DataCategory> data_category_from_machine_name(std::string_view name)
{
    for (const auto& row : kCategoryNames) {
        if (row.machine == name) {
            return row.category;
        }
    }
    return std::nullopt;
}

std::optional<SafetyCategory> safety_category_from_machine_name(std::string_view name)
{
    for (const auto& row : kSafetyNames) {
        if (row.machine == name) {
            return row.category;
        }
    }
    return std::nullopt;
}

std::optional<Purpose> purpose_from_machine_name(std::string_view name)
{
    for (const auto& row : kPurposeNames) {
        if (row.machine == name) {
            return row.purpose;
        }
    }
    return std::nullopt;
}

std::string_view relevance_phrase(RiskRank rank)
{
    switch (rank.value) {
    case 1:
        return "Directly identifiable";
    case 2:
        return "Partially identifiable";
    case 3:
        return "Access";
    case 4:
        return "Context-dependent";
    default:
        raise(errc::invalid_rank, "risk rank must be in 1..4, got " + std::to_string(rank.value));
    }
}

std::string_view category_phrase(RiskRank rank, DataCategory category)
{
    if (!admissible(rank, category)) {
        raise(errc::invalid_rank_category_pair,
              "category '" + std::string(machine_name(category)) + "' is not admissible at rank "
                      + std::to_string(rank.value));
    }
    return kCategoryNames[static_cast<std::size_t>(category)].phrase;
}

ParsedLabel parse_label(std::string_view text)
{
    std::string normalized = collapse_spaces(text);

    // Accept both the ASCII arrow and the typographic one.
    std::size_t arrow_len = 2;
    std::size_t arrow = normalized.find("->");
    if (arrow == std::string::npos) {
        arrow = normalized.find("→");
        arrow_len = std::string_view("→").size();
    }
    if (arrow == std::string::npos) {
        raise(errc::empty_identifier, "label text has no '->' identifier part: " + normalized);
    }

    std::string head = collapse_spaces(normalized.substr(0, arrow));
    std::string identifier_raw = normalized.substr(arrow + arrow_len);
    std::string head_lower = lower(head);

    static constexpr std::array<std::pair<std::string_view, int>, 4> kRelevancePrefixes = {{
            {"directly identifiable", 1},
            {"partially identifiable", 2},
            {"context-dependent", 4},
            {"access", 3},
    }};

    int rank = 0;
    std::size_t prefix_len = 0;
    for (const auto& [prefix, r] : kRelevancePrefixes) {
        if (head_lower.starts_with(prefix)) {
            rank = r;
            prefix_len = prefix.size();
            break;
        }
    }
    if (rank == 0) {
        raise(errc::unknown_relevance, "no relevance tier recognized in: " + head);
    }

    std::string phrase = head_lower.substr(prefix_len);
    if (!phrase.empty() && phrase.front() == ' ') {
        phrase.erase(phrase.begin());
    }

    for (DataCategory cat : categories_for_rank(RiskRank{rank})) {
        if (lower(category_phrase(RiskRank{rank}, cat)) == phrase) {
            return ParsedLabel{PrivacyLabel{RiskRank{rank}, cat},
                               make_identifier(identifier_raw)};
        }
    }
    raise(errc::invalid_rank_category_pair,
          "'" + phrase + "' is not a rank-" + std::to_string(rank) + " category");
}

std::string format_label(const PrivacyLabel& label, const IdentifierTag& identifier)
{
    std::string out(relevance_phrase(label.rank));
    out += ' ';
    out += category_phrase(label.rank, label.category);
    out += " -> ";
    out += identifier.name;
    return out;
}

} // namespace privaudit
