#include "privaudit/axml.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "byte_reader.hpp"
#include "unicode.hpp"

namespace privaudit {

namespace {

using detail::ByteReader;

// Chunk types.
constexpr std::uint16_t kResStringPool = 0x0001;
constexpr std::uint16_t kResTable = 0x0002;
constexpr std::uint16_t kResXml = 0x0003;
constexpr std::uint16_t kResXmlStartNamespace = 0x0100;
constexpr std::uint16_t kResXmlEndNamespace = 0x0101;
constexpr std::uint16_t kResXmlStartElement = 0x0102;
constexpr std::uint16_t kResXmlEndElement = 0x0103;
constexpr std::uint16_t kResXmlCdata = 0x0104;
constexpr std::uint16_t kResXmlResourceMap = 0x0180;
constexpr std::uint16_t kResTablePackage = 0x0200;
constexpr std::uint16_t kResTableType = 0x0201;

// Res_value data types.
constexpr std::uint8_t kTypeNull = 0x00;
constexpr std::uint8_t kTypeReference = 0x01;
constexpr std::uint8_t kTypeAttribute = 0x02;
constexpr std::uint8_t kTypeString = 0x03;
constexpr std::uint8_t kTypeIntDec = 0x10;
constexpr std::uint8_t kTypeIntHex = 0x11;
constexpr std::uint8_t kTypeIntBoolean = 0x12;
constexpr std::uint8_t kTypeDynamicReference = 0x07;

constexpr std::uint32_t kNoEntry = 0xFFFFFFFF;

struct ChunkHeader {
    std::uint16_t type = 0;
    std::uint16_t header_size = 0;
    std::uint32_t size = 0;
};

ChunkHeader read_chunk_header(ByteReader& reader)
{
    ChunkHeader header;
    header.type = reader.u16();
    header.header_size = reader.u16();
    header.size = reader.u32();
    return header;
}

// Validates a sub-chunk at `start` inside a region ending at `region_end`
// and returns the offset of the next chunk. Chunk sizes are forced to move
// the cursor forward so fuzzed inputs cannot loop.
std::size_t check_chunk(const ChunkHeader& header, std::size_t start, std::size_t region_end)
{
    if (header.header_size < 8 || header.size < header.header_size
            || start + header.size > region_end) {
        raise(errc::truncated_chunk,
              "chunk at offset " + std::to_string(start) + " overruns its container");
    }
    return start + header.size;
}

StringPool parse_string_pool_chunk(ByteReader& reader, std::size_t chunk_start,
                                   const ChunkHeader& header)
{
    StringPool pool;
    const std::size_t chunk_end = chunk_start + header.size;

    std::uint32_t string_count = reader.u32();
    reader.u32(); // style count (spans are ignored)
    std::uint32_t flags = reader.u32();
    std::uint32_t strings_start = reader.u32();
    reader.u32(); // styles start

    bool utf8 = (flags & (1u << 8)) != 0;
    pool.encoding = utf8 ? StringPool::Encoding::Utf8 : StringPool::Encoding::Utf16;

    // Guard against absurd counts before allocating.
    if (string_count > header.size / 4) {
        raise(errc::truncated_chunk, "string pool count exceeds chunk size");
    }

    reader.seek(chunk_start + header.header_size);
    std::vector<std::uint32_t> offsets(string_count);
    for (auto& offset : offsets) {
        offset = reader.u32();
    }

    pool.strings.reserve(string_count);
    for (std::uint32_t offset : offsets) {
        std::size_t pos = chunk_start + strings_start + offset;
        if (pos >= chunk_end) {
            raise(errc::truncated_chunk, "string data offset outside pool");
        }
        reader.seek(pos);
        if (utf8) {
            // utf16 length (ignored), then byte length, both with a
            // high-bit extension byte.
            std::uint32_t u16len = reader.u8();
            if (u16len & 0x80) {
                reader.u8();
            }
            std::uint32_t byte_len = reader.u8();
            if (byte_len & 0x80) {
                byte_len = ((byte_len & 0x7f) << 8) | reader.u8();
            }
            auto bytes = reader.bytes(byte_len);
            std::string_view raw(reinterpret_cast<const char*>(bytes.data()), bytes.size());
            pool.strings.push_back(detail::sanitize_utf8(raw, pool.had_invalid_sequences));
        }
        else {
            std::uint32_t len = reader.u16();
            if (len & 0x8000) {
                len = ((len & 0x7fff) << 16) | reader.u16();
            }
            if (len > reader.remaining() / 2) {
                raise(errc::truncated_chunk, "string length exceeds pool data");
            }
            std::vector<std::uint16_t> units(len);
            for (auto& unit : units) {
                unit = reader.u16();
            }
            pool.strings.push_back(detail::utf16_to_utf8(units, pool.had_invalid_sequences));
        }
    }
    return pool;
}

struct ResValue {
    std::uint8_t data_type = 0;
    std::uint32_t data = 0;
};

ResValue read_res_value(ByteReader& reader)
{
    ResValue value;
    reader.u16(); // size
    reader.u8();  // res0
    value.data_type = reader.u8();
    value.data = reader.u32();
    return value;
}

AttrValue decode_attr_value(const ResValue& value, const StringPool& pool)
{
    switch (value.data_type) {
    case kTypeString:
        return StrValue{pool.at(value.data)};
    case kTypeReference:
    case kTypeAttribute:
    case kTypeDynamicReference:
        return ResRef{value.data, {}};
    case kTypeIntHex:
        return HexFlags{value.data};
    case kTypeIntBoolean:
        return BoolValue{value.data != 0};
    case kTypeIntDec:
        return IntValue{static_cast<std::int32_t>(value.data)};
    case kTypeNull:
        return StrValue{std::string()};
    default:
        return IntValue{static_cast<std::int32_t>(value.data)};
    }
}

char hex_digit(std::uint32_t nibble)
{
    return "0123456789abcdef"[nibble & 0xF];
}

std::string synthetic_attr_name(std::uint32_t resource_id)
{
    std::string out = "attr_0x";
    for (int shift = 28; shift >= 0; shift -= 4) {
        out.push_back(hex_digit(resource_id >> shift));
    }
    return out;
}

struct InputTypeName {
    std::string_view name;
    std::uint32_t bits;
};

// Public android:inputType constants.
constexpr std::array<InputTypeName, 32> kInputTypeNames = {{
        {"none", 0x00000000},
        {"text", 0x00000001},
        {"textCapCharacters", 0x00001001},
        {"textCapWords", 0x00002001},
        {"textCapSentences", 0x00004001},
        {"textAutoCorrect", 0x00008001},
        {"textAutoComplete", 0x00010001},
        {"textMultiLine", 0x00020001},
        {"textImeMultiLine", 0x00040001},
        {"textNoSuggestions", 0x00080001},
        {"textUri", 0x00000011},
        {"textEmailAddress", 0x00000021},
        {"textEmailSubject", 0x00000031},
        {"textShortMessage", 0x00000041},
        {"textLongMessage", 0x00000051},
        {"textPersonName", 0x00000061},
        {"textPostalAddress", 0x00000071},
        {"textPassword", 0x00000081},
        {"textVisiblePassword", 0x00000091},
        {"textWebEditText", 0x000000a1},
        {"textFilter", 0x000000b1},
        {"textPhonetic", 0x000000c1},
        {"textWebEmailAddress", 0x000000d1},
        {"textWebPassword", 0x000000e1},
        {"number", 0x00000002},
        {"numberSigned", 0x00001002},
        {"numberDecimal", 0x00002002},
        {"numberPassword", 0x00000012},
        {"phone", 0x00000003},
        {"datetime", 0x00000004},
        {"date", 0x00000014},
        {"time", 0x00000024},
}};

} // namespace

std::string ResRef::leaf() const
{
    std::size_t slash = name.rfind('/');
    return slash == std::string::npos ? name : name.substr(slash + 1);
}

const XmlAttribute* XmlElement::find_attribute(std::string_view local_name) const
{
    const XmlAttribute* fallback = nullptr;
    for (const XmlAttribute& attr : attributes) {
        if (attr.name != local_name) {
            continue;
        }
        if (attr.namespace_uri && *attr.namespace_uri == kAndroidNamespaceUri) {
            return &attr;
        }
        if (!fallback) {
            fallback = &attr;
        }
    }
    return fallback;
}

const std::string& StringPool::at(std::size_t index) const
{
    if (index >= strings.size()) {
        raise(errc::string_index_out_of_range,
              "index " + std::to_string(index) + " of " + std::to_string(strings.size()));
    }
    return strings[index];
}

void ResourceTable::add(std::uint32_t id, Entry entry)
{
    entries_[id] = std::move(entry);
}

const ResourceTable::Entry* ResourceTable::find(std::uint32_t id) const
{
    auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<std::string> ResourceTable::string_for(std::uint32_t id) const
{
    const Entry* entry = find(id);
    if (!entry) {
        return std::nullopt;
    }
    return entry->string_value;
}

bool looks_like_binary_xml(std::span<const std::byte> bytes)
{
    if (bytes.size() < 4) {
        return false;
    }
    return static_cast<std::uint8_t>(bytes[0]) == 0x03 && static_cast<std::uint8_t>(bytes[1]) == 0x00;
}

XmlDocument parse_binary_xml(std::span<const std::byte> bytes)
{
    ByteReader reader(bytes, errc::truncated_chunk);
    if (bytes.size() < 8) {
        raise(errc::bad_magic, "buffer too small for a binary XML header");
    }
    ChunkHeader doc = read_chunk_header(reader);
    if (doc.type != kResXml) {
        raise(errc::bad_magic, "expected RES_XML_TYPE (0x0003)");
    }
    if (doc.size < doc.header_size || doc.size > bytes.size() || doc.header_size < 8) {
        raise(errc::truncated_chunk, "document chunk size is implausible");
    }
    const std::size_t doc_end = doc.size;

    StringPool pool;
    std::vector<std::uint32_t> resource_map;
    std::vector<XmlElement> stack;
    std::optional<XmlElement> finished_root;
    // uri index -> prefix index, innermost last
    std::vector<std::pair<std::uint32_t, std::uint32_t>> namespaces;

    std::size_t cursor = doc.header_size;
    while (cursor + 8 <= doc_end) {
        reader.seek(cursor);
        ChunkHeader chunk = read_chunk_header(reader);
        std::size_t next = check_chunk(chunk, cursor, doc_end);

        switch (chunk.type) {
        case kResStringPool:
            pool = parse_string_pool_chunk(reader, cursor, chunk);
            break;
        case kResXmlResourceMap: {
            std::size_t count = (chunk.size - chunk.header_size) / 4;
            reader.seek(cursor + chunk.header_size);
            resource_map.resize(count);
            for (auto& id : resource_map) {
                id = reader.u32();
            }
            break;
        }
        case kResXmlStartNamespace: {
            reader.seek(cursor + chunk.header_size);
            std::uint32_t prefix = reader.u32();
            std::uint32_t uri = reader.u32();
            namespaces.emplace_back(uri, prefix);
            break;
        }
        case kResXmlEndNamespace:
            if (!namespaces.empty()) {
                namespaces.pop_back();
            }
            break;
        case kResXmlStartElement: {
            reader.seek(cursor + chunk.header_size);
            reader.u32(); // element namespace (unused: local names only)
            std::uint32_t name_idx = reader.u32();
            std::uint16_t attribute_start = reader.u16();
            std::uint16_t attribute_size = reader.u16();
            std::uint16_t attribute_count = reader.u16();
            reader.u16(); // id index
            reader.u16(); // class index
            reader.u16(); // style index

            if (attribute_size < 20) {
                raise(errc::truncated_chunk, "attribute record smaller than 20 bytes");
            }

            XmlElement element;
            element.name = pool.at(name_idx);
            element.attributes.reserve(attribute_count);
            for (std::uint16_t i = 0; i < attribute_count; ++i) {
                reader.seek(cursor + chunk.header_size + attribute_start
                            + static_cast<std::size_t>(i) * attribute_size);
                std::uint32_t attr_ns = reader.u32();
                std::uint32_t attr_name = reader.u32();
                reader.u32(); // raw value
                ResValue value = read_res_value(reader);

                XmlAttribute attribute;
                if (attr_ns != kNoEntry) {
                    attribute.namespace_uri = pool.at(attr_ns);
                }
                attribute.name = pool.at(attr_name);
                if (attribute.name.empty() && attr_name < resource_map.size()) {
                    // Minified pools drop attribute names; keep the id visible.
                    attribute.name = synthetic_attr_name(resource_map[attr_name]);
                }
                attribute.value = decode_attr_value(value, pool);
                element.attributes.push_back(std::move(attribute));
            }
            stack.push_back(std::move(element));
            break;
        }
        case kResXmlEndElement: {
            if (stack.empty()) {
                raise(errc::unbalanced_elements, "end element without matching start");
            }
            XmlElement done = std::move(stack.back());
            stack.pop_back();
            if (stack.empty()) {
                if (finished_root) {
                    raise(errc::unbalanced_elements, "multiple root elements");
                }
                finished_root = std::move(done);
            }
            else {
                stack.back().children.push_back(std::move(done));
            }
            break;
        }
        case kResXmlCdata: {
            reader.seek(cursor + chunk.header_size);
            std::uint32_t text_idx = reader.u32();
            if (!stack.empty()) {
                XmlElement& top = stack.back();
                top.text = top.text.value_or("") + pool.at(text_idx);
            }
            break;
        }
        default:
            // Tool-specific chunks are skipped by size.
            break;
        }
        cursor = next;
    }

    if (!stack.empty() || !finished_root) {
        raise(errc::unbalanced_elements, "document ended with open elements");
    }
    return XmlDocument{std::move(*finished_root)};
}

ResourceTable parse_resource_table(std::span<const std::byte> bytes)
{
    ByteReader reader(bytes, errc::truncated_chunk);
    if (bytes.size() < 8) {
        raise(errc::bad_magic, "buffer too small for a resource table header");
    }
    ChunkHeader table_header = read_chunk_header(reader);
    if (table_header.type != kResTable) {
        raise(errc::bad_magic, "expected RES_TABLE_TYPE (0x0002)");
    }
    if (table_header.size < table_header.header_size || table_header.size > bytes.size()
            || table_header.header_size < 12) {
        raise(errc::truncated_chunk, "table chunk size is implausible");
    }
    const std::size_t table_end = table_header.size;

    ResourceTable table;
    StringPool global_pool;
    bool have_global_pool = false;
    std::map<std::uint32_t, bool> is_default_config;

    std::size_t cursor = table_header.header_size;
    while (cursor + 8 <= table_end) {
        reader.seek(cursor);
        ChunkHeader chunk = read_chunk_header(reader);
        std::size_t next = check_chunk(chunk, cursor, table_end);

        if (chunk.type == kResStringPool && !have_global_pool) {
            global_pool = parse_string_pool_chunk(reader, cursor, chunk);
            have_global_pool = true;
        }
        else if (chunk.type == kResTablePackage) {
            const std::size_t pkg_start = cursor;
            const std::size_t pkg_end = cursor + chunk.size;
            std::uint32_t pkg_id = reader.u32();
            reader.skip(256); // package name, char16[128]
            std::uint32_t type_strings_off = reader.u32();
            reader.u32(); // last public type
            std::uint32_t key_strings_off = reader.u32();

            auto parse_pool_at = [&](std::uint32_t offset) {
                if (offset == 0) {
                    return StringPool{};
                }
                std::size_t start = pkg_start + offset;
                if (start + 8 > pkg_end) {
                    raise(errc::truncated_chunk, "package pool offset outside package");
                }
                reader.seek(start);
                ChunkHeader pool_header = read_chunk_header(reader);
                if (pool_header.type != kResStringPool) {
                    raise(errc::truncated_chunk, "expected a string pool chunk");
                }
                check_chunk(pool_header, start, pkg_end);
                return parse_string_pool_chunk(reader, start, pool_header);
            };
            StringPool type_strings = parse_pool_at(type_strings_off);
            StringPool key_strings = parse_pool_at(key_strings_off);

            std::size_t sub = pkg_start + chunk.header_size;
            while (sub + 8 <= pkg_end) {
                reader.seek(sub);
                ChunkHeader sc = read_chunk_header(reader);
                std::size_t sub_next = check_chunk(sc, sub, pkg_end);
                if (sc.type == kResTableType && sc.header_size >= 20) {
                    std::uint8_t type_id = reader.u8();
                    std::uint8_t type_flags = reader.u8();
                    reader.u16(); // reserved
                    std::uint32_t entry_count = reader.u32();
                    std::uint32_t entries_start = reader.u32();
                    std::uint32_t config_size = reader.u32();

                    bool sparse = (type_flags & 0x01) != 0;
                    // The default configuration is the all-zero config payload.
                    bool default_config = true;
                    if (config_size >= 4) {
                        reader.seek(sub + 24);
                        for (std::uint32_t i = 4; i < config_size; ++i) {
                            if (reader.u8() != 0) {
                                default_config = false;
                            }
                        }
                    }
                    if (type_id == 0 || sparse || entry_count > sc.size / 4) {
                        sub = sub_next;
                        continue;
                    }

                    reader.seek(sub + sc.header_size);
                    std::vector<std::uint32_t> offsets(entry_count);
                    for (auto& off : offsets) {
                        off = reader.u32();
                    }
                    for (std::uint32_t i = 0; i < entry_count; ++i) {
                        if (offsets[i] == kNoEntry) {
                            continue;
                        }
                        std::size_t entry_pos = sub + entries_start + offsets[i];
                        if (entry_pos + 8 > pkg_end) {
                            raise(errc::truncated_chunk, "entry offset outside type chunk");
                        }
                        reader.seek(entry_pos);
                        reader.u16(); // entry size
                        std::uint16_t entry_flags = reader.u16();
                        std::uint32_t key_idx = reader.u32();

                        std::uint32_t res_id = (static_cast<std::uint32_t>(pkg_id) << 24)
                                | (static_cast<std::uint32_t>(type_id) << 16) | i;

                        auto seen = is_default_config.find(res_id);
                        if (seen != is_default_config.end() && seen->second) {
                            continue; // default config already captured
                        }

                        ResourceTable::Entry entry;
                        entry.name = type_strings.at(static_cast<std::size_t>(type_id) - 1) + "/"
                                + key_strings.at(key_idx);
                        if ((entry_flags & 0x0001) == 0) { // not FLAG_COMPLEX
                            ResValue value = read_res_value(reader);
                            if (value.data_type == kTypeString && have_global_pool) {
                                entry.string_value = global_pool.at(value.data);
                            }
                        }
                        table.add(res_id, std::move(entry));
                        is_default_config[res_id] = default_config;
                    }
                }
                sub = sub_next;
            }
        }
        cursor = next;
    }
    return table;
}

std::optional<std::string> resolve_string(const AttrValue& value, const ResourceTable* table)
{
    if (const auto* str = std::get_if<StrValue>(&value)) {
        return str->value;
    }
    const auto* ref = std::get_if<ResRef>(&value);
    if (!ref) {
        return std::nullopt;
    }
    if (ref->id && table) {
        if (const ResourceTable::Entry* entry = table->find(*ref->id)) {
            if (entry->string_value) {
                return entry->string_value;
            }
            ResRef named{std::nullopt, entry->name};
            return named.leaf();
        }
    }
    if (!ref->name.empty()) {
        return ref->leaf();
    }
    return std::nullopt;
}

std::optional<std::uint32_t> input_type_flags_from_names(std::string_view names)
{
    std::uint32_t bits = 0;
    std::size_t start = 0;
    bool any = false;
    while (start <= names.size()) {
        std::size_t bar = names.find('|', start);
        std::string_view token = bar == std::string_view::npos
                ? names.substr(start)
                : names.substr(start, bar - start);
        while (!token.empty() && token.front() == ' ') {
            token.remove_prefix(1);
        }
        while (!token.empty() && token.back() == ' ') {
            token.remove_suffix(1);
        }
        if (!token.empty()) {
            auto it = std::find_if(kInputTypeNames.begin(), kInputTypeNames.end(),
                                   [&](const InputTypeName& row) { return row.name == token; });
            if (it == kInputTypeNames.end()) {
                return std::nullopt;
            }
            bits |= it->bits;
            any = true;
        }
        if (bar == std::string_view::npos) {
            break;
        }
        start = bar + 1;
    }
    if (!any) {
        return std::nullopt;
    }
    return bits;
}

} // namespace privaudit
