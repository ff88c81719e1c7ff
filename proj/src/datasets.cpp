#include "privaudit/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "embedded_datasets.hpp"

namespace privaudit {

namespace {

constexpr std::string_view kKeywordsFile = "keywords.psv";
constexpr std::string_view kApisFile = "apis.psv";
constexpr std::string_view kPermissionsFile = "permissions.psv";
constexpr std::string_view kMappingFile = "mapping.psv";
constexpr std::string_view kVersionFile = "VERSION";

constexpr std::string_view kKeywordsHeader = "keyword|rank|category|identifier|priority|context_overrides";
constexpr std::string_view kApisHeader = "signature|rank|category|identifier";
constexpr std::string_view kPermissionsHeader = "permission|safety_category";
constexpr std::string_view kMappingHeader = "rank|category|identifier_glob|safety_category_or_none";

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

std::string trim(std::string_view s)
{
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
        --end;
    }
    return std::string(s.substr(begin, end - begin));
}

// Lowercases and collapses any separator run to a single space.
std::string normalize_keyword(std::string_view raw)
{
    std::string out;
    bool pending = false;
    for (char c : raw) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            if (pending && !out.empty()) {
                out.push_back(' ');
            }
            pending = false;
            out.push_back(static_cast<char>(std::tolower(u)));
        }
        else {
            pending = true;
        }
    }
    return out;
}

struct PsvRow {
    int line_no = 0;
    std::vector<std::string> fields;
};

// One record per line, '|' separator, '#' comments, header line required.
std::vector<PsvRow> parse_psv(const std::string& text, std::string_view expected_header,
                              std::size_t field_count, const std::string& origin)
{
    std::vector<PsvRow> rows;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (stripped != expected_header) {
                raise(errc::malformed_row,
                      origin + ":" + std::to_string(line_no) + ": expected header '"
                              + std::string(expected_header) + "'");
            }
            header_seen = true;
            continue;
        }
        PsvRow row;
        row.line_no = line_no;
        std::size_t start = 0;
        while (true) {
            std::size_t bar = line.find('|', start);
            if (bar == std::string::npos) {
                row.fields.push_back(trim(line.substr(start)));
                break;
            }
            row.fields.push_back(trim(line.substr(start, bar - start)));
            start = bar + 1;
        }
        if (row.fields.size() != field_count) {
            raise(errc::malformed_row,
                  origin + ":" + std::to_string(line_no) + ": expected "
                          + std::to_string(field_count) + " fields, got "
                          + std::to_string(row.fields.size()));
        }
        rows.push_back(std::move(row));
    }
    if (!header_seen) {
        raise(errc::malformed_row, origin + ": missing header line");
    }
    return rows;
}

[[noreturn]] void row_error(const std::string& origin, int line_no, const std::string& reason)
{
    raise(errc::malformed_row, origin + ":" + std::to_string(line_no) + ": " + reason);
}

int parse_int_field(const std::string& origin, int line_no, const std::string& text,
                    const char* what)
{
    try {
        std::size_t used = 0;
        int value = std::stoi(text, &used);
        if (used != text.size()) {
            row_error(origin, line_no, std::string("bad ") + what + " '" + text + "'");
        }
        return value;
    }
    catch (const std::exception&) {
        row_error(origin, line_no, std::string("bad ") + what + " '" + text + "'");
    }
}

PrivacyLabel parse_label_fields(const std::string& origin, int line_no, const std::string& rank_text,
                                const std::string& category_text)
{
    int rank = parse_int_field(origin, line_no, rank_text, "rank");
    auto category = data_category_from_machine_name(category_text);
    if (!category) {
        row_error(origin, line_no, "unknown category '" + category_text + "'");
    }
    try {
        return make_label(rank, *category);
    }
    catch (const Error& e) {
        row_error(origin, line_no, e.what());
    }
}

std::vector<ContextOverride> parse_overrides(const std::string& origin, int line_no,
                                             const std::string& text)
{
    std::vector<ContextOverride> out;
    if (text.empty()) {
        return out;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t semi = text.find(';', start);
        std::string clause = trim(semi == std::string::npos ? text.substr(start)
                                                            : text.substr(start, semi - start));
        if (!clause.empty()) {
            std::size_t eq = clause.find('=');
            if (eq == std::string::npos) {
                row_error(origin, line_no, "override clause missing '=': " + clause);
            }
            std::string trigger = trim(clause.substr(0, eq));
            std::string target = trim(clause.substr(eq + 1));

            ContextOverride ov;
            std::size_t colon = trigger.find(':');
            if (colon == std::string::npos) {
                row_error(origin, line_no, "override trigger missing kind: " + trigger);
            }
            std::string kind = lower(trigger.substr(0, colon));
            ov.value = lower(trim(trigger.substr(colon + 1)));
            if (kind == "domain") {
                ov.trigger = ContextOverride::Trigger::Domain;
            }
            else if (kind == "token") {
                ov.trigger = ContextOverride::Trigger::Token;
            }
            else {
                row_error(origin, line_no, "unknown override trigger kind '" + kind + "'");
            }
            if (ov.value.empty()) {
                row_error(origin, line_no, "empty override trigger value");
            }

            std::size_t c1 = target.find(':');
            std::size_t c2 = c1 == std::string::npos ? std::string::npos : target.find(':', c1 + 1);
            if (c2 == std::string::npos) {
                row_error(origin, line_no, "override target must be rank:category:identifier");
            }
            ov.label = parse_label_fields(origin, line_no, trim(target.substr(0, c1)),
                                          trim(target.substr(c1 + 1, c2 - c1 - 1)));
            try {
                ov.identifier = make_identifier(target.substr(c2 + 1));
            }
            catch (const Error& e) {
                row_error(origin, line_no, e.what());
            }
            out.push_back(std::move(ov));
        }
        if (semi == std::string::npos) {
            break;
        }
        start = semi + 1;
    }
    return out;
}

std::string encode_overrides(const std::vector<ContextOverride>& overrides)
{
    std::string out;
    for (const auto& ov : overrides) {
        if (!out.empty()) {
            out += ';';
        }
        out += ov.trigger == ContextOverride::Trigger::Domain ? "domain:" : "token:";
        out += ov.value;
        out += '=';
        out += std::to_string(ov.label.rank.value);
        out += ':';
        out += machine_name(ov.label.category);
        out += ':';
        out += ov.identifier.name;
    }
    return out;
}

bool valid_permission_name(std::string_view name)
{
    if (name.empty()) {
        return false;
    }
    std::size_t segments = 0;
    std::size_t start = 0;
    while (start <= name.size()) {
        std::size_t dot = name.find('.', start);
        std::string_view seg = dot == std::string_view::npos ? name.substr(start)
                                                             : name.substr(start, dot - start);
        if (seg.empty()) {
            return false;
        }
        for (char c : seg) {
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
                return false;
            }
        }
        ++segments;
        if (dot == std::string_view::npos) {
            break;
        }
        start = dot + 1;
    }
    return segments >= 2;
}

std::string read_file_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(errc::missing_file, path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

bool glob_match(std::string_view pattern, std::string_view text)
{
    std::string p = lower(pattern);
    std::string t = lower(text);
    std::size_t pi = 0, ti = 0;
    std::size_t star = std::string::npos, mark = 0;
    while (ti < t.size()) {
        if (pi < p.size() && (p[pi] == t[ti])) {
            ++pi;
            ++ti;
        }
        else if (pi < p.size() && p[pi] == '*') {
            star = pi++;
            mark = ti;
        }
        else if (star != std::string::npos) {
            pi = star + 1;
            ti = ++mark;
        }
        else {
            return false;
        }
    }
    while (pi < p.size() && p[pi] == '*') {
        ++pi;
    }
    return pi == p.size();
}

CategoryMapping CategoryMapping::from_rows(std::vector<MappingRow> rows)
{
    for (const PrivacyLabel& label : admissible_labels()) {
        std::size_t catch_alls = 0;
        for (const MappingRow& row : rows) {
            if (row.rank && *row.rank != label.rank.value) {
                continue;
            }
            if (row.category && *row.category != label.category) {
                continue;
            }
            if (row.identifier_glob == "*") {
                ++catch_alls;
            }
        }
        if (catch_alls != 1) {
            raise(errc::incomplete_mapping,
                  std::string(catch_alls == 0 ? "no" : "duplicate")
                          + " catch-all mapping row for rank "
                          + std::to_string(label.rank.value) + " category "
                          + std::string(machine_name(label.category)));
        }
    }
    CategoryMapping mapping;
    mapping.rows_ = std::move(rows);
    return mapping;
}

std::optional<SafetyCategory> CategoryMapping::category_for(const PrivacyLabel& label,
                                                            const IdentifierTag& identifier) const
{
    const MappingRow* fallback = nullptr;
    for (const MappingRow& row : rows_) {
        if (row.rank && *row.rank != label.rank.value) {
            continue;
        }
        if (row.category && *row.category != label.category) {
            continue;
        }
        if (row.identifier_glob == "*") {
            if (!fallback) {
                fallback = &row;
            }
            continue;
        }
        if (glob_match(row.identifier_glob, identifier.name)) {
            return row.target;
        }
    }
    if (fallback) {
        return fallback->target;
    }
    return std::nullopt;
}

bool keyword_match_precedes(const KeywordMatch& a, const KeywordMatch& b)
{
    if (a.entry->priority != b.entry->priority) {
        return a.entry->priority > b.entry->priority;
    }
    if (a.label.rank.value != b.label.rank.value) {
        return a.label.rank.value < b.label.rank.value;
    }
    if (a.entry->keyword.size() != b.entry->keyword.size()) {
        return a.entry->keyword.size() > b.entry->keyword.size();
    }
    return a.entry->keyword < b.entry->keyword;
}

std::span<const std::string_view> default_token_stop_list()
{
    static constexpr std::array<std::string_view, 5> kStopList = {"txt", "edt", "et", "input",
                                                                  "field"};
    return kStopList;
}

std::vector<std::string> tokenize_identifier(std::string_view raw,
                                             std::span<const std::string_view> stop_list)
{
    std::vector<std::string> tokens;
    std::string current;

    auto flush = [&] {
        if (current.empty()) {
            return;
        }
        bool stopped = std::find(stop_list.begin(), stop_list.end(), current) != stop_list.end();
        if (!stopped) {
            tokens.push_back(current);
        }
        current.clear();
    };

    char prev = '\0';
    for (std::size_t i = 0; i < raw.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(raw[i]);
        if (!std::isalnum(c)) {
            flush();
            prev = '\0';
            continue;
        }
        bool boundary = false;
        if (prev != '\0') {
            unsigned char p = static_cast<unsigned char>(prev);
            if (std::islower(p) && std::isupper(c)) {
                boundary = true; // camelCase
            }
            else if (std::isalpha(p) && std::isdigit(c)) {
                boundary = true; // letter -> digit
            }
            else if (std::isdigit(p) && std::isalpha(c)) {
                boundary = true;
            }
            else if (std::isupper(p) && std::isupper(c) && i + 1 < raw.size()
                     && std::islower(static_cast<unsigned char>(raw[i + 1]))) {
                boundary = true; // acronym run followed by a word: "HTTPServer"
            }
        }
        if (boundary) {
            flush();
        }
        current.push_back(static_cast<char>(std::tolower(c)));
        prev = raw[i];
    }
    flush();
    return tokens;
}

DatasetBundle DatasetBundle::from_text(const std::string& keywords, const std::string& apis,
                                       const std::string& permissions, const std::string& mapping,
                                       const std::string& version, const std::string& origin)
{
    DatasetBundle bundle;

    // keywords
    {
        const std::string file = origin + "/" + std::string(kKeywordsFile);
        std::map<std::string, int> seen; // keyword -> first line
        for (const PsvRow& row : parse_psv(keywords, kKeywordsHeader, 6, file)) {
            KeywordEntry entry;
            entry.keyword = normalize_keyword(row.fields[0]);
            if (entry.keyword.empty()) {
                row_error(file, row.line_no, "empty keyword");
            }
            entry.label = parse_label_fields(file, row.line_no, row.fields[1], row.fields[2]);
            try {
                entry.identifier = make_identifier(row.fields[3]);
            }
            catch (const Error& e) {
                row_error(file, row.line_no, e.what());
            }
            entry.priority = parse_int_field(file, row.line_no, row.fields[4], "priority");
            if (entry.priority < 0) {
                row_error(file, row.line_no, "priority must be >= 0");
            }
            entry.overrides = parse_overrides(file, row.line_no, row.fields[5]);

            auto [it, inserted] = seen.emplace(entry.keyword, row.line_no);
            if (!inserted) {
                raise(errc::duplicate_keyword,
                      file + ":" + std::to_string(row.line_no) + ": keyword '" + entry.keyword
                              + "' already defined at line " + std::to_string(it->second));
            }
            bundle.keywords_.push_back(std::move(entry));
        }
    }

    // apis
    {
        const std::string file = origin + "/" + std::string(kApisFile);
        std::map<MethodRef, int> seen;
        for (const PsvRow& row : parse_psv(apis, kApisHeader, 4, file)) {
            ApiEntry entry;
            entry.signature = row.fields[0];
            try {
                entry.ref = signature_to_ref(entry.signature);
            }
            catch (const Error& e) {
                row_error(file, row.line_no, e.what());
            }
            entry.label = parse_label_fields(file, row.line_no, row.fields[1], row.fields[2]);
            try {
                entry.identifier = make_identifier(row.fields[3]);
            }
            catch (const Error& e) {
                row_error(file, row.line_no, e.what());
            }

            auto [it, inserted] = seen.emplace(entry.ref, row.line_no);
            if (!inserted) {
                raise(errc::duplicate_signature,
                      file + ":" + std::to_string(row.line_no) + ": signature '" + entry.signature
                              + "' already defined at line " + std::to_string(it->second));
            }
            bundle.apis_.push_back(std::move(entry));
        }
    }

    // permissions
    {
        const std::string file = origin + "/" + std::string(kPermissionsFile);
        for (const PsvRow& row : parse_psv(permissions, kPermissionsHeader, 2, file)) {
            PermissionRule rule;
            rule.permission = row.fields[0];
            if (!valid_permission_name(rule.permission)) {
                row_error(file, row.line_no, "bad permission name '" + rule.permission + "'");
            }
            auto category = safety_category_from_machine_name(row.fields[1]);
            if (!category) {
                row_error(file, row.line_no, "unknown safety category '" + row.fields[1] + "'");
            }
            rule.implied = *category;
            bundle.permissions_.push_back(std::move(rule));
        }
    }

    // mapping
    {
        const std::string file = origin + "/" + std::string(kMappingFile);
        std::vector<MappingRow> rows;
        for (const PsvRow& row : parse_psv(mapping, kMappingHeader, 4, file)) {
            MappingRow mrow;
            if (row.fields[0] != "*") {
                mrow.rank = parse_int_field(file, row.line_no, row.fields[0], "rank");
                if (*mrow.rank < 1 || *mrow.rank > 4) {
                    row_error(file, row.line_no, "rank must be 1..4 or '*'");
                }
            }
            if (row.fields[1] != "*") {
                auto category = data_category_from_machine_name(row.fields[1]);
                if (!category) {
                    row_error(file, row.line_no, "unknown category '" + row.fields[1] + "'");
                }
                mrow.category = *category;
            }
            mrow.identifier_glob = row.fields[2];
            if (mrow.identifier_glob.empty()) {
                row_error(file, row.line_no, "empty identifier glob");
            }
            if (row.fields[3] != "none") {
                auto target = safety_category_from_machine_name(row.fields[3]);
                if (!target) {
                    row_error(file, row.line_no, "unknown safety category '" + row.fields[3] + "'");
                }
                mrow.target = *target;
            }
            rows.push_back(std::move(mrow));
        }
        bundle.mapping_ = CategoryMapping::from_rows(std::move(rows));
    }

    bundle.version_ = trim(version);
    if (bundle.version_.empty()) {
        raise(errc::malformed_row, origin + "/VERSION: empty version string");
    }

    bundle.build_indexes();
    return bundle;
}

void DatasetBundle::build_indexes()
{
    api_index_.clear();
    keyword_index_.clear();
    for (std::size_t i = 0; i < apis_.size(); ++i) {
        api_index_.emplace(apis_[i].ref, i);
    }
    for (std::size_t i = 0; i < keywords_.size(); ++i) {
        keyword_index_.emplace(keywords_[i].keyword, i);
    }
}

DatasetBundle DatasetBundle::load(const std::filesystem::path& root)
{
    if (!std::filesystem::is_directory(root)) {
        raise(errc::missing_file, root.string() + " is not a directory");
    }
    return from_text(read_file_text(root / kKeywordsFile), read_file_text(root / kApisFile),
                     read_file_text(root / kPermissionsFile), read_file_text(root / kMappingFile),
                     read_file_text(root / kVersionFile), root.string());
}

DatasetBundle DatasetBundle::seed()
{
    return from_text(detail::kSeedKeywords, detail::kSeedApis, detail::kSeedPermissions,
                     detail::kSeedMapping, detail::kSeedVersion, "<seed>");
}

DatasetBundle DatasetBundle::from_parts(std::vector<KeywordEntry> keywords,
                                        std::vector<ApiEntry> apis,
                                        std::vector<PermissionRule> permissions,
                                        std::vector<MappingRow> mapping_rows, std::string version)
{
    DatasetBundle bundle;

    std::map<std::string, std::size_t> seen_keywords;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        keywords[i].keyword = normalize_keyword(keywords[i].keyword);
        if (keywords[i].keyword.empty()) {
            raise(errc::malformed_row, "entry " + std::to_string(i) + ": empty keyword");
        }
        if (!admissible(keywords[i].label.rank, keywords[i].label.category)) {
            raise(errc::malformed_row, "entry " + std::to_string(i) + ": inadmissible label");
        }
        auto [it, inserted] = seen_keywords.emplace(keywords[i].keyword, i);
        if (!inserted) {
            raise(errc::duplicate_keyword,
                  "keyword '" + keywords[i].keyword + "' at entries "
                          + std::to_string(it->second) + " and " + std::to_string(i));
        }
    }

    std::map<MethodRef, std::size_t> seen_refs;
    for (std::size_t i = 0; i < apis.size(); ++i) {
        if (apis[i].ref.name.empty()) {
            apis[i].ref = signature_to_ref(apis[i].signature);
        }
        auto [it, inserted] = seen_refs.emplace(apis[i].ref, i);
        if (!inserted) {
            raise(errc::duplicate_signature,
                  "signature '" + apis[i].signature + "' at entries "
                          + std::to_string(it->second) + " and " + std::to_string(i));
        }
    }

    bundle.keywords_ = std::move(keywords);
    bundle.apis_ = std::move(apis);
    bundle.permissions_ = std::move(permissions);
    bundle.mapping_ = CategoryMapping::from_rows(std::move(mapping_rows));
    bundle.version_ = std::move(version);
    if (bundle.version_.empty()) {
        raise(errc::malformed_row, "empty version string");
    }
    bundle.build_indexes();
    return bundle;
}

void DatasetBundle::save(const std::filesystem::path& root) const
{
    std::filesystem::create_directories(root);

    auto open = [&](std::string_view name) {
        std::ofstream out(root / name, std::ios::binary);
        if (!out) {
            raise(errc::io_failure, "cannot write " + (root / name).string());
        }
        return out;
    };

    {
        auto out = open(kKeywordsFile);
        out << kKeywordsHeader << '\n';
        for (const KeywordEntry& e : keywords_) {
            out << e.keyword << '|' << e.label.rank.value << '|' << machine_name(e.label.category)
                << '|' << e.identifier.name << '|' << e.priority << '|'
                << encode_overrides(e.overrides) << '\n';
        }
    }
    {
        auto out = open(kApisFile);
        out << kApisHeader << '\n';
        for (const ApiEntry& e : apis_) {
            out << e.signature << '|' << e.label.rank.value << '|' << machine_name(e.label.category)
                << '|' << e.identifier.name << '\n';
        }
    }
    {
        auto out = open(kPermissionsFile);
        out << kPermissionsHeader << '\n';
        for (const PermissionRule& r : permissions_) {
            out << r.permission << '|' << machine_name(r.implied) << '\n';
        }
    }
    {
        auto out = open(kMappingFile);
        out << kMappingHeader << '\n';
        for (const MappingRow& r : mapping_.rows()) {
            out << (r.rank ? std::to_string(*r.rank) : std::string("*")) << '|'
                << (r.category ? std::string(machine_name(*r.category)) : std::string("*")) << '|'
                << r.identifier_glob << '|'
                << (r.target ? std::string(machine_name(*r.target)) : std::string("none")) << '\n';
        }
    }
    {
        auto out = open(kVersionFile);
        out << version_ << '\n';
    }
}

std::vector<KeywordMatch> DatasetBundle::match_keyword(std::span<const std::string> tokens,
                                                       const AppContext& context) const
{
    std::vector<KeywordMatch> matches;
    const std::string domain = lower(context.domain);

    auto apply = [&](const std::string& candidate) {
        auto [begin, end] = keyword_index_.equal_range(candidate);
        for (auto it = begin; it != end; ++it) {
            const KeywordEntry& entry = keywords_[it->second];
            KeywordMatch match;
            match.entry = &entry;
            match.label = entry.label;
            match.identifier = entry.identifier;
            match.matched_token = candidate;
            for (const ContextOverride& ov : entry.overrides) {
                bool fired = false;
                if (ov.trigger == ContextOverride::Trigger::Domain) {
                    fired = ov.value == domain;
                }
                else {
                    fired = std::find(tokens.begin(), tokens.end(), ov.value) != tokens.end()
                            || std::find(context.co_tokens.begin(), context.co_tokens.end(),
                                         ov.value)
                                    != context.co_tokens.end();
                }
                if (fired) {
                    match.label = ov.label;
                    match.identifier = ov.identifier;
                    break;
                }
            }
            matches.push_back(std::move(match));
        }
    };

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        apply(tokens[i]);
        if (i + 1 < tokens.size()) {
            apply(tokens[i] + " " + tokens[i + 1]);
        }
    }
    return matches;
}

const ApiEntry* DatasetBundle::lookup_api(const MethodRef& ref) const
{
    auto it = api_index_.find(ref);
    if (it == api_index_.end()) {
        return nullptr;
    }
    return &apis_[it->second];
}

} // namespace privaudit
