#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "privaudit/errors.hpp"

namespace privaudit {

// Attribute value variants. Exactly one alternative is populated.
struct StrValue {
    std::string value;
    friend bool operator==(const StrValue&, const StrValue&) = default;
};

struct IntValue {
    std::int32_t value = 0;
    friend bool operator==(const IntValue&, const IntValue&) = default;
};

struct BoolValue {
    bool value = false;
    friend bool operator==(const BoolValue&, const BoolValue&) = default;
};

/// A resource reference: numeric id from binary XML, "type/name" form from
/// decoded plain XML ("@+id/txt_name" is stored as "id/txt_name").
struct ResRef {
    std::optional<std::uint32_t> id;
    std::string name;

    /// Final path segment of the name ("id/txt_name" -> "txt_name").
    std::string leaf() const;

    friend bool operator==(const ResRef&, const ResRef&) = default;
};

struct HexFlags {
    std::uint32_t bits = 0;
    friend bool operator==(const HexFlags&, const HexFlags&) = default;
};

using AttrValue = std::variant<StrValue, IntValue, BoolValue, ResRef, HexFlags>;

struct XmlAttribute {
    std::optional<std::string> namespace_uri;
    std::string name; // local name
    AttrValue value;

    friend bool operator==(const XmlAttribute&, const XmlAttribute&) = default;
};

struct XmlElement {
    std::string name;
    std::vector<XmlAttribute> attributes;
    std::vector<XmlElement> children;
    std::optional<std::string> text;

    /// First attribute with the given local name, preferring the Android
    /// namespace, then un-namespaced attributes.
    const XmlAttribute* find_attribute(std::string_view local_name) const;

    friend bool operator==(const XmlElement&, const XmlElement&) = default;
};

struct XmlDocument {
    XmlElement root;

    friend bool operator==(const XmlDocument&, const XmlDocument&) = default;
};

inline constexpr std::string_view kAndroidNamespaceUri =
        "http://schemas.android.com/apk/res/android";

/// Decoded chunk string pool.
struct StringPool {
    enum class Encoding { Utf8, Utf16 };

    Encoding encoding = Encoding::Utf8;
    std::vector<std::string> strings;
    bool had_invalid_sequences = false;

    const std::string& at(std::size_t index) const; // throws string_index_out_of_range
};

/// String resources of the default configuration; other entries name-only.
class ResourceTable {
public:
    struct Entry {
        std::string name; // "type/key", e.g. "string/app_name"
        std::optional<std::string> string_value;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    void add(std::uint32_t id, Entry entry);
    const Entry* find(std::uint32_t id) const;
    std::optional<std::string> string_for(std::uint32_t id) const;
    std::size_t size() const { return entries_.size(); }

    friend bool operator==(const ResourceTable&, const ResourceTable&) = default;

private:
    std::map<std::uint32_t, Entry> entries_;
};

/// True if the buffer starts with the binary-XML chunk magic.
bool looks_like_binary_xml(std::span<const std::byte> bytes);

/// Parses Android binary XML (manifest or compiled layout).
/// Throws bad_magic, truncated_chunk, string_index_out_of_range,
/// unbalanced_elements.
XmlDocument parse_binary_xml(std::span<const std::byte> bytes);

/// Parses decoded plain-text XML into the same document model. DTDs and
/// external entities are rejected. Throws malformed_xml.
XmlDocument parse_plain_xml(std::string_view text);

/// Parses a binary resource table (resources.arsc).
ResourceTable parse_resource_table(std::span<const std::byte> bytes);

/// Str -> itself; ResRef -> string-resource lookup, falling back to the
/// resource name's final segment; other variants -> nullopt.
std::optional<std::string> resolve_string(const AttrValue& value, const ResourceTable* table);

/// Symbolic android:inputType names ("textPassword|textMultiLine") to flag
/// bits; nullopt when any token is unknown.
std::optional<std::uint32_t> input_type_flags_from_names(std::string_view names);

} // namespace privaudit
