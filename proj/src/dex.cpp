#include "privaudit/dex.hpp"

#include <set>

#include <zlib.h>

#include "byte_reader.hpp"
#include "unicode.hpp"

namespace privaudit {

namespace {

using detail::ByteReader;

constexpr std::size_t kHeaderSize = 0x70;

[[noreturn]] void oob(const char* table, std::uint32_t index)
{
    raise(errc::index_out_of_bounds,
          std::string(table) + " index " + std::to_string(index) + " out of bounds");
}

template <typename T>
const T& at_or_oob(const std::vector<T>& table, std::uint32_t index, const char* name)
{
    if (index >= table.size()) {
        oob(name, index);
    }
    return table[index];
}

} // namespace

std::string DexProto::short_form() const
{
    std::string out = "(";
    for (const std::string& param : param_descriptors) {
        out += param;
    }
    out += ')';
    out += return_descriptor;
    return out;
}

DexFile parse_dex(std::span<const std::byte> bytes)
{
    if (bytes.size() < 8) {
        raise(errc::truncated_file, "buffer smaller than the DEX magic");
    }
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
    if (raw[0] != 'd' || raw[1] != 'e' || raw[2] != 'x' || raw[3] != '\n' || raw[7] != 0) {
        raise(errc::bad_magic, "not a DEX file");
    }
    std::string version(reinterpret_cast<const char*>(raw) + 4, 3);
    static const std::set<std::string> kVersions = {"035", "037", "038", "039", "040", "041"};
    if (!kVersions.contains(version)) {
        raise(errc::unsupported_version, "DEX version '" + version + "'");
    }
    if (bytes.size() < kHeaderSize) {
        raise(errc::truncated_file, "buffer smaller than the DEX header");
    }

    ByteReader reader(bytes, errc::truncated_file);
    reader.seek(8);
    std::uint32_t checksum = reader.u32();
    reader.skip(20); // sha-1 signature (not verified)
    std::uint32_t file_size = reader.u32();
    std::uint32_t header_size = reader.u32();
    std::uint32_t endian_tag = reader.u32();
    if (header_size < kHeaderSize || file_size < header_size || file_size > bytes.size()) {
        raise(errc::truncated_file, "header/file sizes are implausible");
    }
    if (endian_tag != 0x12345678) {
        raise(errc::unsupported_version, "big-endian DEX is not supported");
    }
    // Nothing reads past the declared file size.
    bytes = bytes.first(file_size);
    reader = ByteReader(bytes, errc::truncated_file);
    reader.seek(0x2C); // resume after endian_tag
    reader.skip(8); // link_size, link_off
    reader.u32();   // map_off
    std::uint32_t string_ids_size = reader.u32();
    std::uint32_t string_ids_off = reader.u32();
    std::uint32_t type_ids_size = reader.u32();
    std::uint32_t type_ids_off = reader.u32();
    std::uint32_t proto_ids_size = reader.u32();
    std::uint32_t proto_ids_off = reader.u32();
    reader.skip(8); // field_ids
    std::uint32_t method_ids_size = reader.u32();
    std::uint32_t method_ids_off = reader.u32();

    DexFile dex;
    dex.version = version;
    dex.checksum_ok =
            adler32(adler32(0, nullptr, 0), raw + 12, static_cast<uInt>(file_size - 12))
            == checksum;

    // Guard table sizes against the file size before allocating.
    auto check_table = [&](std::uint32_t count, std::uint32_t offset, std::uint32_t entry_size,
                           const char* what) {
        if (count == 0) {
            return;
        }
        if (offset < header_size || offset > file_size
                || static_cast<std::uint64_t>(count) * entry_size > file_size - offset) {
            raise(errc::truncated_file, std::string(what) + " table overruns the file");
        }
    };
    check_table(string_ids_size, string_ids_off, 4, "string_ids");
    check_table(type_ids_size, type_ids_off, 4, "type_ids");
    check_table(proto_ids_size, proto_ids_off, 12, "proto_ids");
    check_table(method_ids_size, method_ids_off, 8, "method_ids");

    // string_ids -> string_data with a uleb128 utf16 length then MUTF-8.
    dex.string_ids.reserve(string_ids_size);
    for (std::uint32_t i = 0; i < string_ids_size; ++i) {
        reader.seek(string_ids_off + i * 4);
        std::uint32_t data_off = reader.u32();
        if (data_off >= file_size) {
            raise(errc::truncated_file, "string_data offset outside the file");
        }
        reader.seek(data_off);
        reader.uleb128(); // decoded utf16 length (unchecked)
        std::size_t consumed = 0;
        dex.string_ids.push_back(detail::mutf8_to_utf8(
                bytes.subspan(reader.offset(), file_size - reader.offset()), consumed,
                dex.had_invalid_mutf8));
    }

    dex.type_ids.reserve(type_ids_size);
    for (std::uint32_t i = 0; i < type_ids_size; ++i) {
        reader.seek(type_ids_off + i * 4);
        std::uint32_t descriptor_idx = reader.u32();
        dex.type_ids.push_back(at_or_oob(dex.string_ids, descriptor_idx, "string_ids"));
    }

    dex.proto_ids.reserve(proto_ids_size);
    for (std::uint32_t i = 0; i < proto_ids_size; ++i) {
        reader.seek(proto_ids_off + i * 12);
        reader.u32(); // shorty_idx
        std::uint32_t return_type_idx = reader.u32();
        std::uint32_t parameters_off = reader.u32();

        DexProto proto;
        proto.return_descriptor = at_or_oob(dex.type_ids, return_type_idx, "type_ids");
        if (parameters_off != 0) {
            if (parameters_off >= file_size) {
                raise(errc::truncated_file, "type_list offset outside the file");
            }
            reader.seek(parameters_off);
            std::uint32_t param_count = reader.u32();
            if (param_count > (file_size - parameters_off) / 2) {
                raise(errc::truncated_file, "type_list overruns the file");
            }
            proto.param_descriptors.reserve(param_count);
            for (std::uint32_t p = 0; p < param_count; ++p) {
                std::uint16_t type_idx = reader.u16();
                proto.param_descriptors.push_back(at_or_oob(dex.type_ids, type_idx, "type_ids"));
            }
        }
        dex.proto_ids.push_back(std::move(proto));
    }

    dex.method_ids.reserve(method_ids_size);
    for (std::uint32_t i = 0; i < method_ids_size; ++i) {
        reader.seek(method_ids_off + i * 8);
        DexMethodId method;
        method.class_idx = reader.u16();
        method.proto_idx = reader.u16();
        method.name_idx = reader.u32();
        if (method.class_idx >= dex.type_ids.size()) {
            oob("type_ids", method.class_idx);
        }
        if (method.proto_idx >= dex.proto_ids.size()) {
            oob("proto_ids", method.proto_idx);
        }
        if (method.name_idx >= dex.string_ids.size()) {
            oob("string_ids", method.name_idx);
        }
        dex.method_ids.push_back(method);
    }

    return dex;
}

std::vector<MethodRef> method_refs(const DexFile& dex)
{
    std::vector<MethodRef> refs;
    refs.reserve(dex.method_ids.size());
    std::set<MethodRef> seen;
    for (const DexMethodId& method : dex.method_ids) {
        MethodRef ref{dex.type_ids[method.class_idx], dex.string_ids[method.name_idx],
                      dex.proto_ids[method.proto_idx].short_form()};
        if (seen.insert(ref).second) {
            refs.push_back(std::move(ref));
        }
    }
    return refs;
}

} // namespace privaudit
