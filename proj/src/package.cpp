#include "privaudit/package.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>

#include <zlib.h>

#include "byte_reader.hpp"

namespace privaudit {

namespace {

using detail::ByteReader;

constexpr std::string_view kManifestName = "AndroidManifest.xml";
constexpr std::string_view kResourceTableName = "resources.arsc";

constexpr std::uint32_t kEocdSignature = 0x06054b50;
constexpr std::uint32_t kEocd64LocatorSignature = 0x07064b50;
constexpr std::uint32_t kEocd64Signature = 0x06064b50;
constexpr std::uint32_t kCentralSignature = 0x02014b50;
constexpr std::uint32_t kLocalSignature = 0x04034b50;

struct CentralEntry {
    std::string name;
    std::uint16_t method = 0;
    std::uint32_t crc = 0;
    std::uint64_t compressed_size = 0;
    std::uint64_t uncompressed_size = 0;
    std::uint64_t local_offset = 0;
};

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(errc::io_failure, "cannot read " + path.string());
    }
    std::vector<char> buffer((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
    std::vector<std::byte> out(buffer.size());
    std::memcpy(out.data(), buffer.data(), buffer.size());
    return out;
}

std::vector<std::byte> inflate_raw(std::span<const std::byte> compressed,
                                   std::uint64_t expected_size, const std::string& name)
{
    std::vector<std::byte> out(expected_size);
    z_stream stream{};
    if (inflateInit2(&stream, -MAX_WBITS) != Z_OK) {
        raise(errc::corrupt_zip_entry, name + ": inflate init failed");
    }
    stream.next_in = reinterpret_cast<Bytef*>(const_cast<std::byte*>(compressed.data()));
    stream.avail_in = static_cast<uInt>(compressed.size());
    stream.next_out = reinterpret_cast<Bytef*>(out.data());
    stream.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&stream, Z_FINISH);
    bool complete = rc == Z_STREAM_END && stream.total_out == expected_size;
    inflateEnd(&stream);
    if (!complete) {
        raise(errc::corrupt_zip_entry, name + ": corrupt deflate stream");
    }
    return out;
}

/// Central-directory driven ZIP reader; data descriptors are irrelevant
/// because sizes come from the central records.
class ZipReader {
public:
    explicit ZipReader(std::vector<std::byte> data) : data_(std::move(data))
    {
        parse_central_directory();
    }

    const std::vector<CentralEntry>& entries() const { return entries_; }

    std::vector<std::byte> extract(const CentralEntry& entry) const
    {
        ByteReader reader(data_, errc::corrupt_zip_entry);
        reader.seek(entry.local_offset);
        if (reader.u32() != kLocalSignature) {
            raise(errc::corrupt_zip_entry, entry.name + ": bad local header");
        }
        reader.skip(22); // version, flags, method, time, date, crc, sizes
        std::uint16_t name_len = reader.u16();
        std::uint16_t extra_len = reader.u16();
        reader.skip(static_cast<std::size_t>(name_len) + extra_len);

        auto payload = reader.bytes(entry.compressed_size);
        std::vector<std::byte> out;
        if (entry.method == 0) {
            if (entry.compressed_size != entry.uncompressed_size) {
                raise(errc::corrupt_zip_entry, entry.name + ": stored sizes disagree");
            }
            out.assign(payload.begin(), payload.end());
        }
        else if (entry.method == 8) {
            out = inflate_raw(payload, entry.uncompressed_size, entry.name);
        }
        else {
            raise(errc::corrupt_zip_entry,
                  entry.name + ": unsupported compression method "
                          + std::to_string(entry.method));
        }

        std::uint32_t crc = crc32(crc32(0, nullptr, 0),
                                  reinterpret_cast<const Bytef*>(out.data()),
                                  static_cast<uInt>(out.size()));
        if (crc != entry.crc) {
            raise(errc::corrupt_zip_entry, entry.name + ": CRC mismatch");
        }
        return out;
    }

private:
    void parse_central_directory()
    {
        // EOCD: scan backwards over the trailing comment space.
        if (data_.size() < 22) {
            raise(errc::not_an_apk, "file too small to be a ZIP archive");
        }
        std::size_t scan_limit = data_.size() >= 22 + 65535 ? data_.size() - 22 - 65535 : 0;
        std::size_t eocd_pos = data_.size(); // sentinel
        for (std::size_t pos = data_.size() - 22 + 1; pos-- > scan_limit;) {
            ByteReader probe(data_, errc::corrupt_zip_entry);
            probe.seek(pos);
            if (probe.u32() == kEocdSignature) {
                eocd_pos = pos;
                break;
            }
        }
        if (eocd_pos == data_.size()) {
            raise(errc::not_an_apk, "no end-of-central-directory record");
        }

        ByteReader reader(data_, errc::corrupt_zip_entry);
        reader.seek(eocd_pos + 4);
        reader.skip(6); // disk numbers, entries on this disk
        std::uint64_t total_entries = reader.u16();
        std::uint64_t cd_size = reader.u32();
        std::uint64_t cd_offset = reader.u32();

        if ((total_entries == 0xFFFF || cd_offset == 0xFFFFFFFF || cd_size == 0xFFFFFFFF)
                && eocd_pos >= 20) {
            ByteReader locator(data_, errc::corrupt_zip_entry);
            locator.seek(eocd_pos - 20);
            if (locator.u32() == kEocd64LocatorSignature) {
                locator.u32(); // disk with the zip64 EOCD
                std::uint64_t lo = locator.u32();
                std::uint64_t hi = locator.u32();
                std::uint64_t eocd64_pos = lo | (hi << 32);
                ByteReader eocd64(data_, errc::corrupt_zip_entry);
                eocd64.seek(eocd64_pos);
                if (eocd64.u32() != kEocd64Signature) {
                    raise(errc::corrupt_zip_entry, "bad zip64 EOCD record");
                }
                eocd64.skip(20); // record size, versions, disk numbers
                eocd64.skip(8);  // entries on this disk
                std::uint64_t lo2 = eocd64.u32();
                total_entries = lo2 | (static_cast<std::uint64_t>(eocd64.u32()) << 32);
                lo2 = eocd64.u32();
                cd_size = lo2 | (static_cast<std::uint64_t>(eocd64.u32()) << 32);
                lo2 = eocd64.u32();
                cd_offset = lo2 | (static_cast<std::uint64_t>(eocd64.u32()) << 32);
            }
        }

        if (cd_offset + cd_size > data_.size()) {
            raise(errc::corrupt_zip_entry, "central directory overruns the file");
        }

        reader.seek(cd_offset);
        for (std::uint64_t i = 0; i < total_entries; ++i) {
            if (reader.u32() != kCentralSignature) {
                raise(errc::corrupt_zip_entry, "bad central directory record");
            }
            reader.skip(6); // versions, flags
            CentralEntry entry;
            entry.method = reader.u16();
            reader.skip(4); // time, date
            entry.crc = reader.u32();
            entry.compressed_size = reader.u32();
            entry.uncompressed_size = reader.u32();
            std::uint16_t name_len = reader.u16();
            std::uint16_t extra_len = reader.u16();
            std::uint16_t comment_len = reader.u16();
            reader.skip(8); // disk, attributes
            entry.local_offset = reader.u32();
            auto name_bytes = reader.bytes(name_len);
            entry.name.assign(reinterpret_cast<const char*>(name_bytes.data()), name_len);

            // zip64 extended information in the extra field
            std::size_t extra_end = reader.offset() + extra_len;
            while (reader.offset() + 4 <= extra_end) {
                std::uint16_t tag = reader.u16();
                std::uint16_t size = reader.u16();
                if (reader.offset() + size > extra_end) {
                    break;
                }
                if (tag == 0x0001) {
                    std::size_t field_end = reader.offset() + size;
                    auto read_u64 = [&]() {
                        std::uint64_t lo = reader.u32();
                        return lo | (static_cast<std::uint64_t>(reader.u32()) << 32);
                    };
                    if (entry.uncompressed_size == 0xFFFFFFFF && reader.offset() + 8 <= field_end) {
                        entry.uncompressed_size = read_u64();
                    }
                    if (entry.compressed_size == 0xFFFFFFFF && reader.offset() + 8 <= field_end) {
                        entry.compressed_size = read_u64();
                    }
                    if (entry.local_offset == 0xFFFFFFFF && reader.offset() + 8 <= field_end) {
                        entry.local_offset = read_u64();
                    }
                    reader.seek(field_end);
                }
                else {
                    reader.skip(size);
                }
            }
            reader.seek(extra_end);
            reader.skip(comment_len);

            if (entry.name.find("..") != std::string::npos) {
                raise(errc::corrupt_zip_entry, entry.name + ": path escapes the package root");
            }
            entries_.push_back(std::move(entry));
        }
    }

    std::vector<std::byte> data_;
    std::vector<CentralEntry> entries_;
};

AppPackage open_apk(const std::filesystem::path& path)
{
    ZipReader zip(read_file_bytes(path));

    AppPackage package;
    package.source_kind = SourceKind::BinaryApk;

    const CentralEntry* manifest = nullptr;
    const CentralEntry* resource_table = nullptr;
    std::vector<const CentralEntry*> layouts;
    std::map<int, const CentralEntry*> dex_entries;

    for (const CentralEntry& entry : zip.entries()) {
        if (entry.name == kManifestName) {
            manifest = &entry;
        }
        else if (entry.name == kResourceTableName) {
            resource_table = &entry;
        }
        else if (is_layout_path(entry.name)) {
            layouts.push_back(&entry);
        }
        else if (auto seq = dex_sequence_number(entry.name)) {
            dex_entries.emplace(*seq, &entry);
        }
    }
    if (!manifest) {
        raise(errc::missing_manifest, path.string() + " has no AndroidManifest.xml");
    }
    if (dex_entries.empty()) {
        raise(errc::not_an_apk, path.string() + " has no classes.dex payload");
    }

    std::vector<std::byte> manifest_data = zip.extract(*manifest);
    package.manifest = PackageEntry{manifest->name, std::move(manifest_data)};
    if (resource_table) {
        std::vector<std::byte> table_data = zip.extract(*resource_table);
        package.resource_table = PackageEntry{resource_table->name, std::move(table_data)};
    }
    std::sort(layouts.begin(), layouts.end(),
              [](const CentralEntry* a, const CentralEntry* b) { return a->name < b->name; });
    for (const CentralEntry* entry : layouts) {
        std::vector<std::byte> data = zip.extract(*entry);
        package.layouts.push_back(PackageEntry{entry->name, std::move(data)});
    }
    for (const auto& [seq, entry] : dex_entries) {
        std::vector<std::byte> data = zip.extract(*entry);
        package.dex_files.push_back(PackageEntry{entry->name, std::move(data)});
    }
    return package;
}

AppPackage open_decoded_dir(const std::filesystem::path& root)
{
    AppPackage package;
    package.source_kind = SourceKind::DecodedDir;

    std::filesystem::path manifest_path = root / kManifestName;
    if (!std::filesystem::is_regular_file(manifest_path)) {
        raise(errc::missing_manifest, root.string() + " has no AndroidManifest.xml");
    }
    std::vector<std::byte> manifest_data = read_file_bytes(manifest_path);
    package.manifest = PackageEntry{std::string(kManifestName), std::move(manifest_data)};

    if (std::filesystem::is_regular_file(root / kResourceTableName)) {
        std::vector<std::byte> table_data = read_file_bytes(root / kResourceTableName);
        package.resource_table =
                PackageEntry{std::string(kResourceTableName), std::move(table_data)};
    }

    std::map<int, std::filesystem::path> dex_paths;
    std::vector<std::string> layout_names;
    std::map<std::string, std::filesystem::path> layout_paths;
    for (const auto& item : std::filesystem::recursive_directory_iterator(root)) {
        if (!item.is_regular_file()) {
            continue;
        }
        std::string rel = std::filesystem::relative(item.path(), root).generic_string();
        if (is_layout_path(rel)) {
            layout_names.push_back(rel);
            layout_paths.emplace(rel, item.path());
        }
        else if (auto seq = dex_sequence_number(rel)) {
            dex_paths.emplace(*seq, item.path());
        }
    }
    std::sort(layout_names.begin(), layout_names.end());
    for (const std::string& rel : layout_names) {
        std::vector<std::byte> data = read_file_bytes(layout_paths.at(rel));
        package.layouts.push_back(PackageEntry{rel, std::move(data)});
    }
    for (const auto& [seq, file] : dex_paths) {
        std::vector<std::byte> data = read_file_bytes(file);
        package.dex_files.push_back(
                PackageEntry{std::filesystem::relative(file, root).generic_string(),
                             std::move(data)});
    }
    return package;
}

} // namespace

bool is_layout_path(std::string_view entry_path)
{
    if (!entry_path.starts_with("res/") || !entry_path.ends_with(".xml")) {
        return false;
    }
    std::size_t start = 0;
    while (start < entry_path.size()) {
        std::size_t slash = entry_path.find('/', start);
        std::string_view segment = slash == std::string_view::npos
                ? entry_path.substr(start)
                : entry_path.substr(start, slash - start);
        if (segment == "layout" || segment.starts_with("layout-")) {
            return true;
        }
        if (slash == std::string_view::npos) {
            break;
        }
        start = slash + 1;
    }
    return false;
}

std::optional<int> dex_sequence_number(std::string_view entry_path)
{
    if (entry_path.find('/') != std::string_view::npos) {
        return std::nullopt;
    }
    if (!entry_path.starts_with("classes") || !entry_path.ends_with(".dex")) {
        return std::nullopt;
    }
    std::string_view digits = entry_path.substr(7, entry_path.size() - 7 - 4);
    if (digits.empty()) {
        return 1;
    }
    int value = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        value = value * 10 + (c - '0');
        if (value > 1000000) {
            return std::nullopt;
        }
    }
    return value >= 2 ? std::optional<int>(value) : std::nullopt;
}

AppPackage open_package(const std::filesystem::path& path)
{
    if (std::filesystem::is_directory(path)) {
        return open_decoded_dir(path);
    }
    if (!std::filesystem::is_regular_file(path)) {
        raise(errc::not_an_apk, path.string() + " does not exist");
    }
    return open_apk(path);
}

} // namespace privaudit
