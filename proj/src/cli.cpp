#include "privaudit/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "privaudit/analyzer.hpp"

namespace privaudit {

namespace {

using nlohmann::json;

std::string timestamp_now()
{
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

DatasetBundle load_bundle(const RunConfig& config)
{
    std::filesystem::path dir = config.datasets_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("PRIVAUDIT_DATASETS")) {
            dir = env;
        }
    }
    if (dir.empty()) {
        return DatasetBundle::seed();
    }
    return DatasetBundle::load(dir);
}

json label_to_json(const PrivacyLabel& label, const IdentifierTag& identifier)
{
    return json{{"rank", label.rank.value},
                {"category", std::string(machine_name(label.category))},
                {"identifier", identifier.name}};
}

json analysis_to_json(const AnalysisResult& result, const RunConfig& config)
{
    json ui = json::array();
    for (const LabeledField& field : result.ui_sources) {
        json row = label_to_json(field.label, field.identifier);
        row["layout"] = field.record.layout_path;
        row["widget"] = field.record.widget;
        row["decided_by"] = std::string(label_stage_name(field.decided_by));
        if (field.record.field_id) {
            row["field_id"] = *field.record.field_id;
        }
        if (field.record.hint) {
            row["hint"] = *field.record.hint;
        }
        if (field.record.label_text) {
            row["label_text"] = *field.record.label_text;
        }
        if (field.matched_token) {
            row["matched_token"] = *field.matched_token;
        }
        ui.push_back(std::move(row));
    }

    json apis = json::array();
    for (const ApiSourceRecord& api : result.api_sources) {
        json row = label_to_json(api.label, api.identifier);
        row["signature"] = ref_to_signature(api.ref);
        row["dex_index"] = api.dex_index;
        apis.push_back(std::move(row));
    }

    json permissions = json::array();
    for (const PermissionEvidence& permission : result.permissions) {
        json row{{"permission", permission.permission}};
        if (permission.implied) {
            row["implied_category"] = std::string(machine_name(*permission.implied));
        }
        else {
            row["implied_category"] = nullptr;
        }
        permissions.push_back(std::move(row));
    }

    json categories = json::array();
    for (SafetyCategory category : all_safety_categories()) {
        auto it = result.evidence.per_category.find(category);
        if (it == result.evidence.per_category.end() || it->second.empty()) {
            continue;
        }
        std::vector<std::string> kinds;
        for (const EvidenceItem& item : it->second) {
            std::string kind(evidence_kind_name(item));
            if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
                kinds.push_back(std::move(kind));
            }
        }
        categories.push_back(json{{"category", std::string(machine_name(category))},
                                  {"evidence_kinds", kinds},
                                  {"items", it->second.size()}});
    }

    json unmappable = json::array();
    for (const EvidenceItem& item : result.evidence.unmappable) {
        unmappable.push_back(describe_evidence(item));
    }

    json doc{{"app", result.app_path},         {"ui_sources", std::move(ui)},
             {"api_sources", std::move(apis)}, {"permissions", std::move(permissions)},
             {"categories", std::move(categories)}, {"unmappable", std::move(unmappable)},
             {"warnings", result.warnings}};
    if (config.timestamps) {
        doc["generated_at"] = timestamp_now();
    }
    return doc;
}

json comparison_to_json(const ComparisonReport& report)
{
    json matrix = json::array();
    for (const CategoryStatus& status : report.statuses) {
        matrix.push_back(json{{"category", std::string(machine_name(status.category))},
                              {"state", std::string(category_state_name(status.state))},
                              {"evidence_kinds", status.evidence_kinds}});
    }
    json verdicts = json::array();
    for (Verdict verdict : report.verdicts) {
        verdicts.push_back(std::string(verdict_name(verdict)));
    }
    return json{{"matrix", std::move(matrix)},
                {"verdicts", std::move(verdicts)},
                {"inconsistencies", report.inconsistencies},
                {"unmappable", report.unmappable_notes}};
}

void render_analysis_table(std::ostream& out, const AnalysisResult& result)
{
    out << "Package: " << result.app_path << "\n";

    out << "\nPermissions (" << result.permissions.size() << "):\n";
    for (const PermissionEvidence& permission : result.permissions) {
        out << "  " << permission.permission << " -> "
            << (permission.implied ? display_name(*permission.implied) : "(no category)") << "\n";
    }

    out << "\nUI sources (" << result.ui_sources.size() << "):\n";
    for (const LabeledField& field : result.ui_sources) {
        out << "  " << field.record.layout_path << "  " << field.record.widget;
        if (field.record.field_id) {
            out << " id=" << *field.record.field_id;
        }
        out << "  => " << format_label(field.label, field.identifier) << "  [decided by "
            << label_stage_name(field.decided_by) << "]\n";
    }

    out << "\nAPI sources (" << result.api_sources.size() << "):\n";
    for (const ApiSourceRecord& api : result.api_sources) {
        out << "  " << ref_to_signature(api.ref) << "  => "
            << format_label(api.label, api.identifier) << "  [classes";
        if (api.dex_index > 1) {
            out << api.dex_index;
        }
        out << ".dex]\n";
    }

    out << "\nCollected categories:\n";
    for (SafetyCategory category : all_safety_categories()) {
        auto it = result.evidence.per_category.find(category);
        if (it == result.evidence.per_category.end() || it->second.empty()) {
            continue;
        }
        std::vector<std::string> kinds;
        for (const EvidenceItem& item : it->second) {
            std::string kind(evidence_kind_name(item));
            if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
                kinds.push_back(std::move(kind));
            }
        }
        out << "  " << display_name(category) << " (";
        for (std::size_t i = 0; i < kinds.size(); ++i) {
            out << (i ? ", " : "") << kinds[i];
        }
        out << ")\n";
    }

    if (!result.evidence.unmappable.empty()) {
        out << "\nNot expressible in the data-safety form ("
            << result.evidence.unmappable.size() << "):\n";
        for (const EvidenceItem& item : result.evidence.unmappable) {
            out << "  " << describe_evidence(item) << "\n";
        }
    }
    if (!result.warnings.empty()) {
        out << "\nWarnings (" << result.warnings.size() << "):\n";
        for (const std::string& warning : result.warnings) {
            out << "  " << warning << "\n";
        }
    }
}

void render_comparison_table(std::ostream& out, const std::string& app,
                             const ComparisonReport& report)
{
    out << "Data-safety comparison: " << app << "\n";
    out << "  " << category_state_symbol(CategoryState::CollectedNotReported) << " collected   "
        << category_state_symbol(CategoryState::ReportedNotCollected) << " reported   "
        << category_state_symbol(CategoryState::CollectedAndReported)
        << " collected and reported\n\n";

    for (const CategoryStatus& status : report.statuses) {
        std::string name(display_name(status.category));
        out << "  " << std::left << std::setw(26) << name
            << category_state_symbol(status.state);
        if (!status.evidence_kinds.empty()) {
            out << "   (";
            for (std::size_t i = 0; i < status.evidence_kinds.size(); ++i) {
                out << (i ? ", " : "") << status.evidence_kinds[i];
            }
            out << ")";
        }
        out << "\n";
    }

    out << "\nVerdicts:";
    if (report.verdicts.empty()) {
        out << " none";
    }
    for (Verdict verdict : report.verdicts) {
        out << " " << verdict_name(verdict);
    }
    out << "\n";
    if (!report.inconsistencies.empty()) {
        out << "Inconsistencies:\n";
        for (const std::string& flag : report.inconsistencies) {
            out << "  " << flag << "\n";
        }
    }
    for (const std::string& note : report.unmappable_notes) {
        out << "Note: " << note << "\n";
    }
}

bool report_has_discrepancies(const ComparisonReport& report)
{
    if (!report.verdicts.empty()) {
        return true;
    }
    return std::any_of(report.statuses.begin(), report.statuses.end(),
                       [](const CategoryStatus& status) {
                           return status.state == CategoryState::CollectedNotReported;
                       });
}

int cmd_analyze(const std::string& apk, const RunConfig& config, std::ostream& out,
                std::ostream& err)
{
    if (!std::filesystem::exists(apk)) {
        err << "privaudit: " << apk << ": no such file or directory\n";
        return kExitUsageError;
    }
    try {
        DatasetBundle bundle = load_bundle(config);
        AnalysisResult result = analyze_package(apk, bundle, AppContext{config.domain, {}});
        if (config.format == RunConfig::Format::Json) {
            out << analysis_to_json(result, config).dump(2) << "\n";
        }
        else {
            render_analysis_table(out, result);
        }
        if (config.fail_on_warnings && !result.warnings.empty()) {
            err << "privaudit: failing on " << result.warnings.size() << " warning(s)\n";
            return kExitAnalysisError;
        }
        return kExitOk;
    }
    catch (const Error& e) {
        err << "privaudit: " << apk << ": " << e.what() << "\n";
        return kExitAnalysisError;
    }
    catch (const std::exception& e) {
        err << "privaudit: " << apk << ": " << e.what() << "\n";
        return kExitAnalysisError;
    }
}

int cmd_compare(const std::string& apk, const std::string& declaration, const RunConfig& config,
                std::ostream& out, std::ostream& err)
{
    if (!std::filesystem::exists(apk)) {
        err << "privaudit: " << apk << ": no such file or directory\n";
        return kExitUsageError;
    }
    if (!std::filesystem::exists(declaration)) {
        err << "privaudit: " << declaration << ": no such file or directory\n";
        return kExitUsageError;
    }
    try {
        DatasetBundle bundle = load_bundle(config);
        AnalysisResult result = analyze_package(apk, bundle, AppContext{config.domain, {}});
        SafetyDeclaration decl = SafetyDeclaration::load(declaration);
        ComparisonReport report = compare(decl, result.evidence);

        if (config.format == RunConfig::Format::Json) {
            json doc = comparison_to_json(report);
            doc["app"] = result.app_path;
            doc["declaration"] = declaration;
            doc["warnings"] = result.warnings;
            if (config.timestamps) {
                doc["generated_at"] = timestamp_now();
            }
            out << doc.dump(2) << "\n";
        }
        else {
            render_comparison_table(out, result.app_path, report);
        }
        if (config.fail_on_warnings && !result.warnings.empty()) {
            err << "privaudit: failing on " << result.warnings.size() << " warning(s)\n";
            return kExitAnalysisError;
        }
        return report_has_discrepancies(report) ? kExitDiscrepancies : kExitOk;
    }
    catch (const Error& e) {
        err << "privaudit: " << e.what() << "\n";
        return kExitAnalysisError;
    }
    catch (const std::exception& e) {
        err << "privaudit: " << e.what() << "\n";
        return kExitAnalysisError;
    }
}

int cmd_validate_datasets(const std::string& dir, const RunConfig& config, std::ostream& out,
                          std::ostream& err)
{
    try {
        DatasetBundle bundle;
        if (!dir.empty()) {
            bundle = DatasetBundle::load(dir);
        }
        else {
            bundle = load_bundle(config);
        }
        out << "keywords.psv: " << bundle.keywords().size() << " entries\n";
        out << "apis.psv: " << bundle.apis().size() << " entries\n";
        out << "permissions.psv: " << bundle.permissions().size() << " entries\n";
        out << "mapping.psv: " << bundle.mapping().rows().size() << " rows\n";
        out << "VERSION: " << bundle.version() << "\n";
        return kExitOk;
    }
    catch (const Error& e) {
        err << "privaudit: " << e.what() << "\n";
        return kExitAnalysisError;
    }
    catch (const std::exception& e) {
        err << "privaudit: " << e.what() << "\n";
        return kExitAnalysisError;
    }
}

struct BatchRow {
    std::string name;
    bool failed = false;
    std::string error;
    bool compared = false;
    int collected = 0;
    int starred = 0;
    int reported_only = 0;
    int both = 0;
    std::set<Verdict> verdicts;
    std::size_t warning_count = 0;
};

BatchRow process_batch_app(const std::filesystem::path& apk, const DatasetBundle& bundle,
                           const RunConfig& config)
{
    BatchRow row;
    row.name = apk.filename().generic_string();
    try {
        AnalysisResult result = analyze_package(apk, bundle, AppContext{config.domain, {}});
        row.warning_count = result.warnings.size();
        for (const auto& [category, items] : result.evidence.per_category) {
            if (!items.empty()) {
                ++row.collected;
            }
        }
        std::filesystem::path declaration = apk;
        declaration.replace_extension(".declaration");
        if (std::filesystem::exists(declaration)) {
            row.compared = true;
            ComparisonReport report = compare(SafetyDeclaration::load(declaration),
                                              result.evidence);
            for (const CategoryStatus& status : report.statuses) {
                switch (status.state) {
                case CategoryState::CollectedNotReported:
                    ++row.starred;
                    break;
                case CategoryState::ReportedNotCollected:
                    ++row.reported_only;
                    break;
                case CategoryState::CollectedAndReported:
                    ++row.both;
                    break;
                case CategoryState::Absent:
                    break;
                }
            }
            row.verdicts = report.verdicts;
        }
    }
    catch (const Error& e) {
        row.failed = true;
        row.error = e.what();
    }
    catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

int cmd_batch(const std::string& dir, const RunConfig& config, std::ostream& out,
              std::ostream& err)
{
    if (!std::filesystem::is_directory(dir)) {
        err << "privaudit: " << dir << ": not a directory\n";
        return kExitUsageError;
    }
    std::vector<std::filesystem::path> apps;
    for (const auto& item : std::filesystem::directory_iterator(dir)) {
        if (item.is_regular_file() && item.path().extension() == ".apk") {
            apps.push_back(item.path());
        }
    }
    std::sort(apps.begin(), apps.end());
    if (apps.empty()) {
        err << "privaudit: " << dir << ": no .apk files\n";
        return kExitUsageError;
    }

    DatasetBundle bundle;
    try {
        bundle = load_bundle(config);
    }
    catch (const Error& e) {
        err << "privaudit: " << e.what() << "\n";
        return kExitAnalysisError;
    }

    std::vector<BatchRow> rows(apps.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= apps.size()) {
                break;
            }
            rows[i] = process_batch_app(apps[i], bundle, config);
        }
    };
    int workers = std::clamp(config.workers, 1, 64);
    std::vector<std::thread> pool;
    for (int i = 1; i < workers; ++i) {
        pool.emplace_back(work);
    }
    work();
    for (std::thread& thread : pool) {
        thread.join();
    }

    bool any_error = false;
    bool any_discrepancy = false;
    for (const BatchRow& row : rows) {
        if (row.failed) {
            any_error = true;
        }
        else if (row.compared && (row.starred > 0 || !row.verdicts.empty())) {
            any_discrepancy = true;
        }
        if (config.fail_on_warnings && row.warning_count > 0) {
            any_error = true;
        }
    }

    if (config.format == RunConfig::Format::Json) {
        json list = json::array();
        for (const BatchRow& row : rows) {
            json entry{{"app", row.name}};
            if (row.failed) {
                entry["status"] = "error";
                entry["error"] = row.error;
            }
            else {
                entry["status"] = row.compared
                        ? ((row.starred > 0 || !row.verdicts.empty()) ? "discrepancies" : "ok")
                        : "analyzed";
                entry["collected_categories"] = row.collected;
                if (row.compared) {
                    entry["collected_not_reported"] = row.starred;
                    entry["reported_not_collected"] = row.reported_only;
                    entry["collected_and_reported"] = row.both;
                    json verdicts = json::array();
                    for (Verdict verdict : row.verdicts) {
                        verdicts.push_back(std::string(verdict_name(verdict)));
                    }
                    entry["verdicts"] = std::move(verdicts);
                }
                entry["warnings"] = row.warning_count;
            }
            list.push_back(std::move(entry));
        }
        json doc{{"apps", std::move(list)}};
        if (config.timestamps) {
            doc["generated_at"] = timestamp_now();
        }
        out << doc.dump(2) << "\n";
    }
    else {
        for (const BatchRow& row : rows) {
            out << std::left << std::setw(32) << row.name;
            if (row.failed) {
                out << "ERROR  " << row.error << "\n";
                continue;
            }
            if (row.compared) {
                out << category_state_symbol(CategoryState::CollectedNotReported) << "="
                    << row.starred << " " << category_state_symbol(CategoryState::ReportedNotCollected)
                    << "=" << row.reported_only << " "
                    << category_state_symbol(CategoryState::CollectedAndReported) << "=" << row.both;
                if (!row.verdicts.empty()) {
                    out << "  verdicts:";
                    for (Verdict verdict : row.verdicts) {
                        out << " " << verdict_name(verdict);
                    }
                }
            }
            else {
                out << "collected categories: " << row.collected;
            }
            if (row.warning_count > 0) {
                out << "  warnings: " << row.warning_count;
            }
            out << "\n";
        }
    }

    if (any_error) {
        return kExitAnalysisError;
    }
    return any_discrepancy ? kExitDiscrepancies : kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Static privacy audit for Android packages"};
    app.name("privaudit");
    app.require_subcommand(1);

    RunConfig config;
    std::string datasets_dir;
    std::string format = "table";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--datasets", datasets_dir,
                        "Dataset directory (default: bundled seed, or $PRIVAUDIT_DATASETS)");
        cmd->add_option("--format", format, "Output format: table or json")
                ->check(CLI::IsMember({"table", "json"}));
        cmd->add_option("--domain", config.domain,
                        "App domain tag feeding keyword context (messaging, ecommerce, ...)");
        cmd->add_flag("--fail-on-warnings", config.fail_on_warnings,
                      "Exit non-zero when the analysis emits warnings");
        cmd->add_flag("--timestamps", config.timestamps, "Include a timestamp in JSON output");
    };

    std::string apk_path;
    std::string declaration_path;
    std::string dir_path;

    CLI::App* analyze = app.add_subcommand("analyze", "Label privacy-related data sources in a package");
    analyze->add_option("package", apk_path, "APK file or apktool-decoded directory")->required();
    add_common(analyze);

    CLI::App* compare_cmd =
            app.add_subcommand("compare", "Compare analysis results against a data-safety declaration");
    compare_cmd->add_option("package", apk_path, "APK file or apktool-decoded directory")
            ->required();
    compare_cmd->add_option("declaration_file", declaration_path, "Declaration snapshot (JSON)");
    compare_cmd->add_option("--declaration", declaration_path, "Declaration snapshot (JSON)")
            ->excludes("declaration_file");
    add_common(compare_cmd);

    CLI::App* validate = app.add_subcommand("validate-datasets", "Validate a dataset directory");
    validate->add_option("dir", dir_path, "Dataset directory (default: configured datasets)");
    validate->add_option("--datasets", datasets_dir, "Dataset directory");

    CLI::App* batch = app.add_subcommand("batch",
                                         "Analyze every .apk in a directory (with optional "
                                         "sibling .declaration files)");
    batch->add_option("dir", dir_path, "Directory of .apk files")->required();
    batch->add_option("--workers", config.workers, "Concurrent analyses")
            ->check(CLI::Range(1, 64));
    add_common(batch);

    std::vector<std::string> argv_storage;
    argv_storage.push_back("privaudit");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(argv_storage.size());
    for (const std::string& arg : argv_storage) {
        argv.push_back(arg.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    }
    catch (const CLI::ParseError& e) {
        err << "privaudit: " << e.what() << "\n";
        return kExitUsageError;
    }

    config.datasets_dir = datasets_dir;
    config.format = format == "json" ? RunConfig::Format::Json : RunConfig::Format::Table;

    try {
        if (analyze->parsed()) {
            return cmd_analyze(apk_path, config, out, err);
        }
        if (compare_cmd->parsed()) {
            if (declaration_path.empty()) {
                err << "privaudit: compare requires a declaration file\n";
                return kExitUsageError;
            }
            return cmd_compare(apk_path, declaration_path, config, out, err);
        }
        if (validate->parsed()) {
            return cmd_validate_datasets(dir_path, config, out, err);
        }
        if (batch->parsed()) {
            return cmd_batch(dir_path, config, out, err);
        }
    }
    catch (const std::exception& e) {
        err << "privaudit: " << e.what() << "\n";
        return kExitAnalysisError;
    }
    err << "privaudit: no subcommand\n";
    return kExitUsageError;
}

} // namespace privaudit
