#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "privaudit/safety_compare.hpp"

using namespace privaudit;
using nlohmann::json;

namespace {

const DatasetBundle& seed()
{
    static DatasetBundle bundle = DatasetBundle::seed();
    return bundle;
}

bool throws_with(errc code, auto&& fn)
{
    try {
        fn();
    }
    catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

LabeledField ui_field(const char* id, int rank, DataCategory category, const char* identifier)
{
    LabeledField field;
    field.record.layout_path = "res/layout/x.xml";
    field.record.widget = "EditText";
    field.record.field_id = id;
    field.label = make_label(rank, category);
    field.identifier = make_identifier(identifier);
    field.decided_by = LabelStage::FieldId;
    return field;
}

ApiSourceRecord api_record(const char* cls, const char* name, const char* proto, int rank,
                           DataCategory category, const char* identifier)
{
    ApiSourceRecord record;
    record.ref = MethodRef{cls, name, proto};
    record.label = make_label(rank, category);
    record.identifier = make_identifier(identifier);
    record.dex_index = 1;
    return record;
}

SafetyDeclaration decl_from(const json& doc)
{
    return SafetyDeclaration::from_json(doc);
}

json type_entry(const char* type, std::initializer_list<const char*> purposes)
{
    json list = json::array();
    for (const char* p : purposes) {
        list.push_back(p);
    }
    return json{{"type", type}, {"purposes", list}};
}

json base_decl()
{
    return json{{"schema_version", 1},
                {"collected", json::object()},
                {"shared", json::object()},
                {"security", {{"encrypted_in_transit", false}, {"deletion_requestable", true}}},
                {"claims_no_collection", false},
                {"claims_no_sharing", false}};
}

CategoryState state_of(const ComparisonReport& report, SafetyCategory category)
{
    for (const CategoryStatus& status : report.statuses) {
        if (status.category == category) {
            return status.state;
        }
    }
    FAIL("category missing from report");
    return CategoryState::Absent;
}

} // namespace

TEST_CASE("declaration snapshots parse and validate")
{
    SafetyDeclaration decl = decl_from(testsupport::signal_like_declaration());
    CHECK(decl.collected.size() == 1);
    CHECK(decl.total_declared_types() == 1);
    CHECK(decl.claims_no_sharing);
    CHECK(decl.security.encrypted_in_transit);

    SUBCASE("round-trips through to_json")
    {
        CHECK(SafetyDeclaration::from_json(decl.to_json()) == decl);
    }

    SUBCASE("schema_version is required")
    {
        json doc = testsupport::signal_like_declaration();
        doc.erase("schema_version");
        CHECK(throws_with(errc::malformed_declaration, [&] { decl_from(doc); }));
        doc["schema_version"] = 99;
        CHECK(throws_with(errc::malformed_declaration, [&] { decl_from(doc); }));
    }

    SUBCASE("no-collection claim forbids collected entries")
    {
        json doc = testsupport::signal_like_declaration();
        doc["claims_no_collection"] = true;
        CHECK(throws_with(errc::malformed_declaration, [&] { decl_from(doc); }));
    }

    SUBCASE("purposes must be non-empty and known")
    {
        json doc = base_decl();
        doc["collected"]["location"] = json::array({json{{"type", "gps"},
                                                         {"purposes", json::array()}}});
        CHECK(throws_with(errc::malformed_declaration, [&] { decl_from(doc); }));

        doc["collected"]["location"] =
                json::array({json{{"type", "gps"}, {"purposes", {"world_domination"}}}});
        CHECK(throws_with(errc::malformed_declaration, [&] { decl_from(doc); }));
    }

    SUBCASE("unknown categories are rejected")
    {
        json doc = base_decl();
        doc["collected"]["weather"] = json::array({type_entry("t", {"analytics"})});
        CHECK(throws_with(errc::malformed_declaration, [&] { decl_from(doc); }));
    }
}

TEST_CASE("aggregate_evidence routes by mapping and keeps the rest")
{
    std::vector<LabeledField> fields = {
            ui_field("txt_country", 2, DataCategory::LocationData, "Approximate location")};
    std::vector<ApiSourceRecord> apis = {
            api_record("Landroid/location/Location;", "getLatitude", "()D", 2,
                       DataCategory::LocationData, "Approximate location"),
            api_record("Landroid/net/wifi/WifiInfo;", "getMacAddress", "()Ljava/lang/String;", 1,
                       DataCategory::DeviceOrOtherIds, "MAC Address"),
            api_record("Landroid/telephony/TelephonyManager;", "getSimSerialNumber",
                       "()Ljava/lang/String;", 2, DataCategory::DeviceData, "SIM card"),
    };
    std::vector<PermissionEvidence> permissions = {
            {"android.permission.RECORD_AUDIO", SafetyCategory::Audio},
            {"android.permission.INTERNET", std::nullopt},
    };

    CollectionEvidence evidence =
            aggregate_evidence(fields, apis, permissions, seed().mapping());

    CHECK(evidence.per_category.size() == 3);
    CHECK(evidence.per_category.contains(SafetyCategory::Location));
    CHECK(evidence.per_category.contains(SafetyCategory::DeviceOrOtherIds));
    CHECK(evidence.per_category.contains(SafetyCategory::Audio));
    CHECK(evidence.per_category.at(SafetyCategory::Location).size() == 2);

    // SIM card and INTERNET cannot be expressed
    CHECK(evidence.unmappable.size() == 2);
    CHECK(evidence.total_items() == 6);

    SUBCASE("empty inputs, empty maps")
    {
        CollectionEvidence none = aggregate_evidence({}, {}, {}, seed().mapping());
        CHECK(none.per_category.empty());
        CHECK(none.unmappable.empty());
    }
}

TEST_CASE("evidence conservation: nothing silently disappears")
{
    std::mt19937 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<LabeledField> fields;
        std::vector<ApiSourceRecord> apis;
        std::vector<PermissionEvidence> permissions;
        auto labels = admissible_labels();
        int field_count = static_cast<int>(rng() % 5);
        for (int i = 0; i < field_count; ++i) {
            const PrivacyLabel& label = labels[rng() % labels.size()];
            fields.push_back(ui_field("f", label.rank.value, label.category, "X"));
        }
        int api_count = static_cast<int>(rng() % 5);
        for (int i = 0; i < api_count; ++i) {
            const PrivacyLabel& label = labels[rng() % labels.size()];
            apis.push_back(api_record("La/B;", "m", "()V", label.rank.value, label.category, "Y"));
        }
        int permission_count = static_cast<int>(rng() % 5);
        for (int i = 0; i < permission_count; ++i) {
            std::optional<SafetyCategory> implied;
            if (rng() % 2) {
                implied = all_safety_categories()[rng() % kSafetyCategoryCount];
            }
            permissions.push_back({"android.permission.P" + std::to_string(i), implied});
        }
        CollectionEvidence evidence =
                aggregate_evidence(fields, apis, permissions, seed().mapping());
        REQUIRE(evidence.total_items()
                == fields.size() + apis.size() + permissions.size());
    }
}

TEST_CASE("compare reproduces the under-reporting row shape")
{
    // evidence in exactly eight categories
    std::vector<LabeledField> fields = {
            ui_field("txt_name", 2, DataCategory::PersonalInformation, "Name"),
            ui_field("txt_country", 2, DataCategory::LocationData, "Approximate location"),
    };
    std::vector<ApiSourceRecord> apis = {
            api_record("Landroid/net/IpPrefix;", "getAddress", "()Ljava/net/InetAddress;", 1,
                       DataCategory::DeviceOrOtherIds, "IP Address"),
    };
    std::vector<PermissionEvidence> permissions = {
            {"android.permission.RECORD_AUDIO", SafetyCategory::Audio},
            {"android.permission.READ_CONTACTS", SafetyCategory::Contacts},
            {"android.permission.READ_SMS", SafetyCategory::Messages},
            {"android.permission.READ_CALENDAR", SafetyCategory::Calendar},
            {"android.permission.CAMERA", SafetyCategory::PhotosAndVideos},
    };
    CollectionEvidence evidence = aggregate_evidence(fields, apis, permissions, seed().mapping());
    SafetyDeclaration decl = decl_from(testsupport::signal_like_declaration());

    ComparisonReport report = compare(decl, evidence);

    int stars = 0, both = 0, reported = 0;
    for (const CategoryStatus& status : report.statuses) {
        switch (status.state) {
        case CategoryState::CollectedNotReported:
            ++stars;
            break;
        case CategoryState::CollectedAndReported:
            ++both;
            break;
        case CategoryState::ReportedNotCollected:
            ++reported;
            break;
        case CategoryState::Absent:
            break;
        }
    }
    CHECK(both == 1);
    CHECK(stars == 7);
    CHECK(reported == 0);
    CHECK(state_of(report, SafetyCategory::PersonalInfo) == CategoryState::CollectedAndReported);
    CHECK(report.verdicts == std::set<Verdict>{Verdict::UnderReporting});
    CHECK(report.statuses.size() == kSafetyCategoryCount);
}

TEST_CASE("compare reproduces the over-reporting row shape")
{
    std::vector<LabeledField> fields = {
            ui_field("card_number", 1, DataCategory::FinancialInformation, "Account"),
            ui_field("cvv", 3, DataCategory::PaymentAuthentication, "Password"),
    };
    std::vector<ApiSourceRecord> apis = {
            api_record("Landroid/location/Location;", "getLatitude", "()D", 2,
                       DataCategory::LocationData, "Approximate location"),
            api_record("Landroid/net/wifi/WifiInfo;", "getMacAddress", "()Ljava/lang/String;", 1,
                       DataCategory::DeviceOrOtherIds, "MAC Address"),
            api_record("Lcom/google/android/gms/auth/api/signin/GoogleSignInAccount;", "getEmail",
                       "()Ljava/lang/String;", 1, DataCategory::PersonalInformation,
                       "Email address"),
    };
    std::vector<PermissionEvidence> permissions = {
            {"android.permission.CAMERA", SafetyCategory::PhotosAndVideos},
            {"android.permission.RECORD_AUDIO", SafetyCategory::Audio},
            {"android.permission.READ_CONTACTS", SafetyCategory::Contacts},
    };
    CollectionEvidence evidence = aggregate_evidence(fields, apis, permissions, seed().mapping());
    SafetyDeclaration decl = decl_from(testsupport::instagram_like_declaration());

    ComparisonReport report = compare(decl, evidence);

    std::set<SafetyCategory> reported_only;
    for (const CategoryStatus& status : report.statuses) {
        if (status.state == CategoryState::ReportedNotCollected) {
            reported_only.insert(status.category);
        }
    }
    CHECK(reported_only
          == std::set<SafetyCategory>{SafetyCategory::Messages, SafetyCategory::HealthAndFitness,
                                      SafetyCategory::Calendar});
    CHECK(report.verdicts.contains(Verdict::OverReporting));
}

TEST_CASE("empty declaration and empty evidence are all absent")
{
    ComparisonReport report = compare(decl_from(base_decl()), CollectionEvidence{});
    for (const CategoryStatus& status : report.statuses) {
        CHECK(status.state == CategoryState::Absent);
    }
    CHECK(report.verdicts.empty());
}

TEST_CASE("declaration verdict rules")
{
    SUBCASE("all fourteen categories means over-reporting")
    {
        json doc = base_decl();
        for (SafetyCategory category : all_safety_categories()) {
            doc["collected"][std::string(machine_name(category))] =
                    json::array({type_entry("t", {"analytics"})});
        }
        CHECK(declaration_verdict(decl_from(doc)) == std::set<Verdict>{Verdict::OverReporting});
    }

    SUBCASE("single data type means under-reporting")
    {
        CHECK(declaration_verdict(decl_from(testsupport::signal_like_declaration()))
              == std::set<Verdict>{Verdict::UnderReporting});
    }

    SUBCASE("claiming no collection means under-reporting")
    {
        json doc = base_decl();
        doc["claims_no_collection"] = true;
        CHECK(declaration_verdict(decl_from(doc)) == std::set<Verdict>{Verdict::UnderReporting});
    }

    SUBCASE("modest declarations get no verdict")
    {
        json doc = base_decl();
        doc["collected"]["location"] = json::array({type_entry("gps", {"analytics"})});
        doc["collected"]["personal_info"] = json::array(
                {type_entry("name", {"app_functionality"}), type_entry("email", {"analytics"})});
        doc["collected"]["audio"] = json::array({type_entry("voice", {"app_functionality"})});
        doc["collected"]["contacts"] = json::array({type_entry("book", {"app_functionality"})});
        doc["collected"]["messages"] = json::array({type_entry("sms", {"app_functionality"})});
        CHECK(declaration_verdict(decl_from(doc)).empty());
    }

    SUBCASE("most types with six or seven purposes means over-reporting")
    {
        json heavy = json::array({"app_functionality", "analytics", "advertising",
                                  "personalization", "account_management",
                                  "fraud_prevention_security_compliance"});
        json doc = base_decl();
        doc["collected"]["location"] =
                json::array({json{{"type", "a"}, {"purposes", heavy}},
                             json{{"type", "b"}, {"purposes", heavy}}});
        doc["collected"]["audio"] =
                json::array({json{{"type", "c"}, {"purposes", {"analytics"}}}});
        // 2 of 3 types are heavy
        CHECK(declaration_verdict(decl_from(doc)) == std::set<Verdict>{Verdict::OverReporting});

        // exactly half is not "most"
        doc["collected"]["audio"] =
                json::array({json{{"type", "c"}, {"purposes", {"analytics"}}},
                             json{{"type", "d"}, {"purposes", {"analytics"}}}});
        CHECK(declaration_verdict(decl_from(doc)).empty());
    }

    SUBCASE("conflicting rules surface as an inconsistency")
    {
        json heavy = json::array({"app_functionality", "analytics", "advertising",
                                  "personalization", "account_management",
                                  "fraud_prevention_security_compliance"});
        json doc = base_decl();
        doc["collected"]["location"] = json::array({json{{"type", "a"}, {"purposes", heavy}}});
        // one type, six purposes: both over- and under-reporting fire
        auto verdicts = declaration_verdict(decl_from(doc));
        CHECK(verdicts.contains(Verdict::OverReporting));
        CHECK(verdicts.contains(Verdict::UnderReporting));
        CHECK(verdicts.contains(Verdict::InconsistentReporting));
    }
}

TEST_CASE("consistency checks catch the documented cases")
{
    SUBCASE("shared without collected")
    {
        json doc = base_decl();
        doc["claims_no_collection"] = true;
        doc["shared"]["location"] = json::array({type_entry("gps", {"analytics"})});
        auto flags = consistency_checks(decl_from(doc));
        REQUIRE(flags.size() == 1);
        CHECK(flags[0].find("shared_without_collected") == 0);
        CHECK(flags[0].find("location") != std::string::npos);
    }

    SUBCASE("security claims without any data")
    {
        json doc = base_decl();
        doc["claims_no_collection"] = true;
        doc["claims_no_sharing"] = true;
        doc["security"]["encrypted_in_transit"] = true;
        auto flags = consistency_checks(decl_from(doc));
        REQUIRE(flags.size() == 1);
        CHECK(flags[0] == "security_claims_without_data");

        ComparisonReport report = compare(decl_from(doc), CollectionEvidence{});
        CHECK(report.verdicts.contains(Verdict::InconsistentReporting));
    }

    SUBCASE("undeletable data is informational only")
    {
        json doc = base_decl();
        doc["collected"]["location"] = json::array({type_entry("gps", {"analytics"}),
                                                    type_entry("wifi", {"analytics"})});
        doc["security"]["deletion_requestable"] = false;
        auto flags = consistency_checks(decl_from(doc));
        REQUIRE(flags.size() == 1);
        CHECK(flags[0].find("no_deletion_with_data") == 0);
        ComparisonReport report = compare(decl_from(doc), CollectionEvidence{});
        CHECK_FALSE(report.verdicts.contains(Verdict::InconsistentReporting));
    }

    SUBCASE("well-formed declarations raise no flags")
    {
        json doc = base_decl();
        doc["collected"]["location"] = json::array({type_entry("gps", {"analytics"}),
                                                    type_entry("wifi", {"analytics"})});
        doc["shared"]["location"] = json::array({type_entry("gps", {"analytics"})});
        CHECK(consistency_checks(decl_from(doc)).empty());
    }
}

TEST_CASE("compare is monotone in evidence")
{
    std::mt19937 rng(23);
    auto labels = admissible_labels();

    for (int trial = 0; trial < 1000; ++trial) {
        // random declaration
        json doc = base_decl();
        for (SafetyCategory category : all_safety_categories()) {
            if (rng() % 3 == 0) {
                doc["collected"][std::string(machine_name(category))] =
                        json::array({type_entry("t", {"analytics"})});
            }
        }
        SafetyDeclaration decl = decl_from(doc);

        std::vector<LabeledField> fields;
        int count = static_cast<int>(rng() % 4);
        for (int i = 0; i < count; ++i) {
            const PrivacyLabel& label = labels[rng() % labels.size()];
            fields.push_back(ui_field("f", label.rank.value, label.category, "X"));
        }
        CollectionEvidence before = aggregate_evidence(fields, {}, {}, seed().mapping());
        ComparisonReport report_before = compare(decl, before);

        const PrivacyLabel& extra = labels[rng() % labels.size()];
        fields.push_back(ui_field("extra", extra.rank.value, extra.category, "X"));
        CollectionEvidence after = aggregate_evidence(fields, {}, {}, seed().mapping());
        ComparisonReport report_after = compare(decl, after);

        for (std::size_t i = 0; i < report_before.statuses.size(); ++i) {
            CategoryState was = report_before.statuses[i].state;
            CategoryState now = report_after.statuses[i].state;
            if (was == CategoryState::Absent) {
                REQUIRE((now == CategoryState::Absent
                         || now == CategoryState::CollectedNotReported));
            }
            else if (was == CategoryState::ReportedNotCollected) {
                REQUIRE((now == CategoryState::ReportedNotCollected
                         || now == CategoryState::CollectedAndReported));
            }
            else {
                REQUIRE(was == now); // collected states never regress
            }
        }
        // verdicts come from the declaration alone
        REQUIRE(report_before.verdicts == report_after.verdicts);
    }
}

TEST_CASE("status table is exhaustive and exclusive")
{
    std::mt19937 rng(29);
    auto labels = admissible_labels();
    for (int trial = 0; trial < 1000; ++trial) {
        json doc = base_decl();
        for (SafetyCategory category : all_safety_categories()) {
            if (rng() % 2) {
                doc["collected"][std::string(machine_name(category))] =
                        json::array({type_entry("t", {"analytics"})});
            }
        }
        std::vector<LabeledField> fields;
        int count = static_cast<int>(rng() % 6);
        for (int i = 0; i < count; ++i) {
            const PrivacyLabel& label = labels[rng() % labels.size()];
            fields.push_back(ui_field("f", label.rank.value, label.category, "X"));
        }
        SafetyDeclaration decl = decl_from(doc);
        CollectionEvidence evidence = aggregate_evidence(fields, {}, {}, seed().mapping());
        ComparisonReport report = compare(decl, evidence);

        REQUIRE(report.statuses.size() == kSafetyCategoryCount);
        std::set<SafetyCategory> seen;
        for (const CategoryStatus& status : report.statuses) {
            REQUIRE(seen.insert(status.category).second); // exactly once

            bool evidenced = evidence.per_category.contains(status.category)
                    && !evidence.per_category.at(status.category).empty();
            bool declared = decl.collected.contains(status.category);
            CategoryState expected = evidenced
                    ? (declared ? CategoryState::CollectedAndReported
                                : CategoryState::CollectedNotReported)
                    : (declared ? CategoryState::ReportedNotCollected : CategoryState::Absent);
            REQUIRE(status.state == expected);
        }
        REQUIRE(seen.size() == kSafetyCategoryCount);
    }
}

TEST_CASE("evidence kinds are listed on collected rows")
{
    std::vector<LabeledField> fields = {
            ui_field("txt_country", 2, DataCategory::LocationData, "Approximate location")};
    std::vector<ApiSourceRecord> apis = {
            api_record("Landroid/location/Location;", "getLatitude", "()D", 2,
                       DataCategory::LocationData, "Approximate location")};
    std::vector<PermissionEvidence> permissions = {
            {"android.permission.ACCESS_FINE_LOCATION", SafetyCategory::Location}};
    CollectionEvidence evidence = aggregate_evidence(fields, apis, permissions, seed().mapping());
    ComparisonReport report = compare(decl_from(base_decl()), evidence);

    for (const CategoryStatus& status : report.statuses) {
        if (status.category == SafetyCategory::Location) {
            CHECK(status.evidence_kinds == std::vector<std::string>{"ui", "api", "permission"});
        }
    }
}
