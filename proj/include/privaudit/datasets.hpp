#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "privaudit/method_ref.hpp"
#include "privaudit/taxonomy.hpp"

namespace privaudit {

/// Analysis context. The domain tag comes from the CLI (messaging,
/// ecommerce, finance, ...); "unknown" applies no domain-triggered
/// overrides. co_tokens carries the co-occurring tokens of the field
/// currently being labeled, for token-triggered overrides.
struct AppContext {
    std::string domain = "unknown";
    std::vector<std::string> co_tokens;
};

/// Replaces a keyword's label when the surrounding context matches:
/// either the app's domain tag or a co-occurring token in the same field.
struct ContextOverride {
    enum class Trigger { Domain, Token };

    Trigger trigger = Trigger::Domain;
    std::string value; // lowercase domain tag or token
    PrivacyLabel label;
    IdentifierTag identifier;

    friend bool operator==(const ContextOverride&, const ContextOverride&) = default;
};

struct KeywordEntry {
    std::string keyword; // normalized: lowercase, single-space separated
    PrivacyLabel label;
    IdentifierTag identifier;
    int priority = 0; // higher wins
    std::vector<ContextOverride> overrides;

    friend bool operator==(const KeywordEntry&, const KeywordEntry&) = default;
};

struct ApiEntry {
    std::string signature; // "pkg.Cls: ret name(params)" as written in the dataset
    MethodRef ref;         // normalized descriptor form
    PrivacyLabel label;
    IdentifierTag identifier;

    friend bool operator==(const ApiEntry&, const ApiEntry&) = default;
};

struct PermissionRule {
    std::string permission; // fully-qualified name
    SafetyCategory implied = SafetyCategory::Location;

    friend bool operator==(const PermissionRule&, const PermissionRule&) = default;
};

/// One row of the label -> data-safety-category mapping. Wildcards: rank or
/// category may be absent (match any) and identifier_glob supports '*'.
struct MappingRow {
    std::optional<int> rank;
    std::optional<DataCategory> category;
    std::string identifier_glob = "*";
    std::optional<SafetyCategory> target; // nullopt = no data-safety home

    friend bool operator==(const MappingRow&, const MappingRow&) = default;
};

/// Simple '*' wildcard match, case-insensitive.
bool glob_match(std::string_view pattern, std::string_view text);

class CategoryMapping {
public:
    CategoryMapping() = default;

    /// Validates totality: every admissible (rank, category) pair must have
    /// exactly one catch-all row (identifier_glob "*"). More specific glob
    /// rows may shadow the catch-all. Throws incomplete_mapping.
    static CategoryMapping from_rows(std::vector<MappingRow> rows);

    /// Deterministic, total over admissible labels: specific-glob rows first
    /// (file order), then the pair's catch-all row.
    std::optional<SafetyCategory> category_for(const PrivacyLabel& label,
                                               const IdentifierTag& identifier) const;

    const std::vector<MappingRow>& rows() const { return rows_; }

    friend bool operator==(const CategoryMapping&, const CategoryMapping&) = default;

private:
    std::vector<MappingRow> rows_;
};

/// A keyword hit with context overrides already applied.
struct KeywordMatch {
    const KeywordEntry* entry = nullptr;
    PrivacyLabel label;       // effective label (post-override)
    IdentifierTag identifier; // effective identifier (post-override)
    std::string matched_token;
};

/// Total tie-break order over matches: priority desc, rank asc, keyword
/// length desc, keyword lexicographic.
bool keyword_match_precedes(const KeywordMatch& a, const KeywordMatch& b);

/// Widget prefixes dropped during identifier tokenization.
std::span<const std::string_view> default_token_stop_list();

/// Lowercases and splits camelCase / snake_case / kebab-case / spaces, then
/// drops stop-list tokens.
std::vector<std::string> tokenize_identifier(
        std::string_view raw,
        std::span<const std::string_view> stop_list = default_token_stop_list());

class DatasetBundle {
public:
    DatasetBundle() = default;

    /// Loads keywords.psv, apis.psv, permissions.psv, mapping.psv and VERSION
    /// from a directory. Throws missing_file, malformed_row,
    /// duplicate_keyword, duplicate_signature, incomplete_mapping.
    static DatasetBundle load(const std::filesystem::path& root);

    /// The compiled-in seed datasets (same content as the datasets/ files).
    static DatasetBundle seed();

    /// Builds a bundle from in-memory parts, running the same validations
    /// as load (keyword/signature uniqueness, mapping totality).
    static DatasetBundle from_parts(std::vector<KeywordEntry> keywords,
                                    std::vector<ApiEntry> apis,
                                    std::vector<PermissionRule> permissions,
                                    std::vector<MappingRow> mapping_rows, std::string version);

    /// Writes the bundle back out in the dataset file format.
    void save(const std::filesystem::path& root) const;

    const std::vector<KeywordEntry>& keywords() const { return keywords_; }
    const std::vector<ApiEntry>& apis() const { return apis_; }
    const std::vector<PermissionRule>& permissions() const { return permissions_; }
    const CategoryMapping& mapping() const { return mapping_; }
    const std::string& version() const { return version_; }

    /// All entries whose keyword equals a token or a contiguous bigram,
    /// overrides applied. Token/bigram scan order, then dataset order.
    std::vector<KeywordMatch> match_keyword(std::span<const std::string> tokens,
                                            const AppContext& context) const;

    /// Exact lookup by descriptor triple.
    const ApiEntry* lookup_api(const MethodRef& ref) const;

    friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;

private:
    static DatasetBundle from_text(const std::string& keywords, const std::string& apis,
                                   const std::string& permissions, const std::string& mapping,
                                   const std::string& version, const std::string& origin);

    void build_indexes();

    std::vector<KeywordEntry> keywords_;
    std::vector<ApiEntry> apis_;
    std::vector<PermissionRule> permissions_;
    CategoryMapping mapping_;
    std::string version_;

    std::map<MethodRef, std::size_t> api_index_;
    std::multimap<std::string, std::size_t> keyword_index_;
};

} // namespace privaudit
