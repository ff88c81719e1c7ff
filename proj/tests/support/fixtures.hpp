#pragma once

// Synthetic app packages with fully known contents. Every fixture's
// expected analysis outcome is documented next to its builder.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "builders.hpp"
#include "privaudit/axml.hpp"

namespace testsupport {

// ---- element construction shorthand ----

privaudit::XmlAttribute astr(std::string name, std::string value);           // android: string
privaudit::XmlAttribute aref_id(std::string name, std::uint32_t resource_id); // android: @id
privaudit::XmlAttribute aref_name(std::string name, std::string ref_name);    // android: "@type/name"
privaudit::XmlAttribute ahex(std::string name, std::uint32_t bits);           // android: hex flags
privaudit::XmlElement elem(std::string name, std::vector<privaudit::XmlAttribute> attrs = {},
                           std::vector<privaudit::XmlElement> children = {});

privaudit::XmlDocument manifest_doc(const std::vector<std::string>& permissions);

// ---- app fixtures (binary APKs) ----

/// Messaging-style app: UI fields country/name/username/password, API refs
/// for IP address, MAC address, latitude, SIM serial, plus audio/contacts/
/// SMS/calendar/camera permissions. Evidence lands in exactly
/// {device_or_other_ids, personal_info, audio, contacts, location,
/// photos_and_videos, messages, calendar}; the SIM serial API and the
/// INTERNET permission are unmappable.
Bytes signal_like_apk();

/// Shopping/social-style app: UI collects card number and CVV only; APIs
/// cover location, device ids, personal info, and mobile-network info
/// (unmappable); camera/audio/contacts/location permissions. Evidence in
/// {financial_info, location, device_or_other_ids, personal_info,
/// photos_and_videos, audio, contacts}.
Bytes instagram_like_apk();

/// Small app whose evidence exactly matches matched_declaration():
/// personal_info (UI) and location (API + permission).
Bytes matched_apk();

/// Valid ZIP, one good layout and one corrupt layout entry.
Bytes mixed_layout_apk();

/// Not a ZIP at all.
Bytes not_an_apk();

/// signal_like_apk with an extra stored padding asset to reach ~5 MB.
Bytes large_apk(std::size_t target_size);

// ---- declarations ----

nlohmann::json signal_like_declaration();    // one data type -> under-reporting
nlohmann::json instagram_like_declaration(); // 10 audited categories, 6 purposes each
nlohmann::json matched_declaration();        // matches matched_apk exactly

// ---- filesystem helpers ----

class ScopedTempDir {
public:
    explicit ScopedTempDir(const std::string& tag);
    ~ScopedTempDir();
    ScopedTempDir(const ScopedTempDir&) = delete;
    ScopedTempDir& operator=(const ScopedTempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const Bytes& data);
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace testsupport
