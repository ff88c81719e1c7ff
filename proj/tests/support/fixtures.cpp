#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>

#include <unistd.h>

namespace testsupport {

using privaudit::HexFlags;
using privaudit::kAndroidNamespaceUri;
using privaudit::ResRef;
using privaudit::StrValue;
using privaudit::XmlAttribute;
using privaudit::XmlDocument;
using privaudit::XmlElement;

namespace {

XmlAttribute android_attr(std::string name, privaudit::AttrValue value)
{
    XmlAttribute attr;
    attr.namespace_uri = std::string(kAndroidNamespaceUri);
    attr.name = std::move(name);
    attr.value = std::move(value);
    return attr;
}

} // namespace

XmlAttribute astr(std::string name, std::string value)
{
    return android_attr(std::move(name), StrValue{std::move(value)});
}

XmlAttribute aref_id(std::string name, std::uint32_t resource_id)
{
    return android_attr(std::move(name), ResRef{resource_id, {}});
}

XmlAttribute aref_name(std::string name, std::string ref_name)
{
    return android_attr(std::move(name), ResRef{std::nullopt, std::move(ref_name)});
}

XmlAttribute ahex(std::string name, std::uint32_t bits)
{
    return android_attr(std::move(name), HexFlags{bits});
}

XmlElement elem(std::string name, std::vector<XmlAttribute> attrs,
                std::vector<XmlElement> children)
{
    XmlElement element;
    element.name = std::move(name);
    element.attributes = std::move(attrs);
    element.children = std::move(children);
    return element;
}

XmlDocument manifest_doc(const std::vector<std::string>& permissions)
{
    std::vector<XmlElement> children;
    for (const std::string& permission : permissions) {
        children.push_back(elem("uses-permission", {astr("name", permission)}));
    }
    children.push_back(elem("application", {astr("label", "Fixture")}));
    XmlElement root = elem("manifest", {astr("package", "com.example.fixture")},
                           std::move(children));
    return XmlDocument{std::move(root)};
}

namespace {

struct LayoutSpec {
    std::string path;
    XmlDocument doc;
};

Bytes assemble_apk(const XmlDocument& manifest, const std::vector<LayoutSpec>& layouts,
                   const ArscResult& arsc, const std::vector<DexMethodSpec>& methods,
                   std::vector<ZipEntrySpec> extra_entries = {})
{
    std::vector<ZipEntrySpec> entries;
    entries.push_back({"AndroidManifest.xml", build_binary_xml(manifest), false});
    entries.push_back({"resources.arsc", arsc.bytes, true});
    for (const LayoutSpec& layout : layouts) {
        entries.push_back({layout.path, build_binary_xml(layout.doc), true});
    }
    entries.push_back({"classes.dex", build_dex(methods), true});
    for (ZipEntrySpec& extra : extra_entries) {
        entries.push_back(std::move(extra));
    }
    return build_zip(entries);
}

} // namespace

Bytes signal_like_apk()
{
    ArscResult arsc = build_arsc(0x7f, {
                                               {"id", "txt_name", std::nullopt},
                                               {"id", "txt_country", std::nullopt},
                                               {"id", "txt_username", std::nullopt},
                                               {"id", "txt_password", std::nullopt},
                                               {"string", "hint_country", "Your country"},
                                       });

    XmlDocument registration{elem(
            "LinearLayout", {astr("orientation", "vertical")},
            {
                    elem("EditText", {aref_id("id", arsc.ids.at("id/txt_name")),
                                      astr("hint", "Your name")}),
                    elem("EditText", {aref_id("id", arsc.ids.at("id/txt_country")),
                                      aref_id("hint", arsc.ids.at("string/hint_country"))}),
                    elem("EditText", {aref_id("id", arsc.ids.at("id/txt_username")),
                                      astr("hint", "Choose a username")}),
                    elem("EditText", {aref_id("id", arsc.ids.at("id/txt_password")),
                                      ahex("inputType", 0x81)}),
            })};

    XmlDocument manifest = manifest_doc({
            "android.permission.RECORD_AUDIO",
            "android.permission.READ_CONTACTS",
            "android.permission.READ_SMS",
            "android.permission.READ_CALENDAR",
            "android.permission.CAMERA",
            "android.permission.INTERNET",
    });

    std::vector<DexMethodSpec> methods = {
            {"Landroid/net/IpPrefix;", "getAddress", "Ljava/net/InetAddress;", {}},
            {"Landroid/net/wifi/WifiInfo;", "getMacAddress", "Ljava/lang/String;", {}},
            {"Landroid/location/Location;", "getLatitude", "D", {}},
            {"Landroid/telephony/TelephonyManager;", "getSimSerialNumber", "Ljava/lang/String;", {}},
            {"Ljava/lang/StringBuilder;", "append", "Ljava/lang/StringBuilder;",
             {"Ljava/lang/String;"}},
    };

    return assemble_apk(manifest, {{"res/layout/registration.xml", std::move(registration)}},
                        arsc, methods);
}

Bytes instagram_like_apk()
{
    ArscResult arsc = build_arsc(0x7f, {
                                               {"id", "card_number", std::nullopt},
                                               {"id", "cvv", std::nullopt},
                                       });

    XmlDocument payment{elem(
            "LinearLayout", {},
            {
                    elem("EditText", {aref_id("id", arsc.ids.at("id/card_number")),
                                      astr("hint", "Name on card")}),
                    elem("EditText",
                         {aref_id("id", arsc.ids.at("id/cvv")), ahex("inputType", 0x12)}),
            })};

    XmlDocument manifest = manifest_doc({
            "android.permission.CAMERA",
            "android.permission.RECORD_AUDIO",
            "android.permission.READ_CONTACTS",
            "android.permission.ACCESS_FINE_LOCATION",
            "android.permission.INTERNET",
    });

    std::vector<DexMethodSpec> methods = {
            {"Landroid/location/Location;", "getLatitude", "D", {}},
            {"Landroid/net/wifi/WifiInfo;", "getMacAddress", "Ljava/lang/String;", {}},
            {"Lcom/google/android/gms/auth/api/signin/GoogleSignInAccount;", "getEmail",
             "Ljava/lang/String;", {}},
            {"Landroid/telephony/TelephonyManager;", "getNetworkOperatorName",
             "Ljava/lang/String;", {}},
    };

    return assemble_apk(manifest, {{"res/layout/payment.xml", std::move(payment)}}, arsc, methods);
}

Bytes matched_apk()
{
    ArscResult arsc = build_arsc(0x7f, {
                                               {"id", "txt_email", std::nullopt},
                                               {"id", "txt_name", std::nullopt},
                                       });

    XmlDocument profile{elem(
            "LinearLayout", {},
            {
                    elem("EditText",
                         {aref_id("id", arsc.ids.at("id/txt_email")), ahex("inputType", 0x21)}),
                    elem("EditText",
                         {aref_id("id", arsc.ids.at("id/txt_name")), astr("hint", "Your name")}),
            })};

    XmlDocument manifest = manifest_doc({"android.permission.ACCESS_FINE_LOCATION"});

    std::vector<DexMethodSpec> methods = {
            {"Landroid/location/Location;", "getLatitude", "D", {}},
    };

    return assemble_apk(manifest, {{"res/layout/profile.xml", std::move(profile)}}, arsc, methods);
}

Bytes mixed_layout_apk()
{
    ArscResult arsc = build_arsc(0x7f, {{"id", "txt_name", std::nullopt}});

    XmlDocument good{elem("LinearLayout", {},
                          {elem("EditText", {aref_id("id", arsc.ids.at("id/txt_name")),
                                             astr("hint", "Your name")})})};

    Bytes corrupt = build_binary_xml(good);
    corrupt.resize(corrupt.size() / 2); // truncated mid-chunk

    XmlDocument manifest = manifest_doc({"android.permission.INTERNET"});
    std::vector<ZipEntrySpec> entries;
    entries.push_back({"AndroidManifest.xml", build_binary_xml(manifest), false});
    entries.push_back({"resources.arsc", arsc.bytes, true});
    entries.push_back({"res/layout/good.xml", build_binary_xml(good), true});
    entries.push_back({"res/layout/bad.xml", corrupt, true});
    entries.push_back(
            {"classes.dex",
             build_dex({{"Landroid/location/Location;", "getLatitude", "D", {}}}), true});
    return build_zip(entries);
}

Bytes not_an_apk()
{
    return to_bytes("this is not a zip archive at all, just text padding to 64 bytes....");
}

Bytes large_apk(std::size_t target_size)
{
    ArscResult arsc = build_arsc(0x7f, {{"id", "txt_name", std::nullopt}});
    XmlDocument layout{elem("LinearLayout", {},
                            {elem("EditText", {aref_id("id", arsc.ids.at("id/txt_name")),
                                               astr("hint", "Your name")})})};
    XmlDocument manifest = manifest_doc({"android.permission.RECORD_AUDIO"});

    // Incompressible padding so the archive stays at the target size.
    Bytes blob(target_size);
    std::mt19937 rng(0xfeed);
    for (std::size_t i = 0; i < blob.size(); i += 4) {
        std::uint32_t word = rng();
        for (std::size_t k = 0; k < 4 && i + k < blob.size(); ++k) {
            blob[i + k] = static_cast<std::byte>((word >> (8 * k)) & 0xFF);
        }
    }

    std::vector<ZipEntrySpec> extras;
    extras.push_back({"assets/padding.bin", std::move(blob), false});
    return assemble_apk(manifest, {{"res/layout/main.xml", std::move(layout)}}, arsc,
                        {{"Landroid/location/Location;", "getLatitude", "D", {}}},
                        std::move(extras));
}

nlohmann::json signal_like_declaration()
{
    return nlohmann::json{
            {"schema_version", 1},
            {"collected",
             {{"personal_info",
               {{{"type", "Phone number"}, {"purposes", {"app_functionality"}}}}}}},
            {"shared", nlohmann::json::object()},
            {"security", {{"encrypted_in_transit", true}, {"deletion_requestable", false}}},
            {"claims_no_collection", false},
            {"claims_no_sharing", true},
    };
}

nlohmann::json instagram_like_declaration()
{
    const char* categories[] = {
            "device_or_other_ids", "personal_info", "audio",    "contacts",
            "location",            "photos_and_videos", "financial_info", "messages",
            "health_and_fitness",  "calendar",
    };
    nlohmann::json purposes = {"app_functionality", "analytics",      "advertising",
                               "personalization",   "account_management",
                               "developer_communications"};
    nlohmann::json collected = nlohmann::json::object();
    for (const char* category : categories) {
        collected[category] = {{{"type", std::string("Declared ") + category},
                                {"purposes", purposes}}};
    }
    return nlohmann::json{
            {"schema_version", 1},
            {"collected", collected},
            {"shared", nlohmann::json::object()},
            {"security", {{"encrypted_in_transit", true}, {"deletion_requestable", true}}},
            {"claims_no_collection", false},
            {"claims_no_sharing", true},
    };
}

nlohmann::json matched_declaration()
{
    return nlohmann::json{
            {"schema_version", 1},
            {"collected",
             {{"personal_info",
               {{{"type", "Email address"}, {"purposes", {"account_management"}}},
                {{"type", "Name"}, {"purposes", {"app_functionality"}}}}},
              {"location",
               {{{"type", "Approximate location"}, {"purposes", {"app_functionality"}}}}}}},
            {"shared", nlohmann::json::object()},
            {"security", {{"encrypted_in_transit", true}, {"deletion_requestable", true}}},
            {"claims_no_collection", false},
            {"claims_no_sharing", true},
    };
}

namespace {
std::atomic<unsigned> g_temp_counter{0};
}

ScopedTempDir::ScopedTempDir(const std::string& tag)
{
    path_ = std::filesystem::temp_directory_path()
            / ("privaudit_" + tag + "_" + std::to_string(::getpid()) + "_"
               + std::to_string(g_temp_counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
}

ScopedTempDir::~ScopedTempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

void write_file(const std::filesystem::path& path, const Bytes& data)
{
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace testsupport
