#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "privaudit/errors.hpp"
#include "privaudit/method_ref.hpp"

namespace privaudit {

struct DexProto {
    std::string return_descriptor;
    std::vector<std::string> param_descriptors;

    /// "(paramDescriptors)returnDescriptor"
    std::string short_form() const;

    friend bool operator==(const DexProto&, const DexProto&) = default;
};

struct DexMethodId {
    std::uint16_t class_idx = 0;
    std::uint16_t proto_idx = 0;
    std::uint32_t name_idx = 0;

    friend bool operator==(const DexMethodId&, const DexMethodId&) = default;
};

/// The identifier tables of one classesN.dex payload.
struct DexFile {
    std::string version;           // "035".."041"
    std::vector<std::string> string_ids;
    std::vector<std::string> type_ids; // descriptors
    std::vector<DexProto> proto_ids;
    std::vector<DexMethodId> method_ids;
    bool checksum_ok = true;        // adler32 over bytes after the checksum field
    bool had_invalid_mutf8 = false; // replaced with U+FFFD when set
};

/// Decodes the string/type/proto/method id tables. Throws bad_magic,
/// unsupported_version, truncated_file, index_out_of_bounds.
DexFile parse_dex(std::span<const std::byte> bytes);

/// One MethodRef per method_ids entry, table order, de-duplicated.
std::vector<MethodRef> method_refs(const DexFile& dex);

} // namespace privaudit
