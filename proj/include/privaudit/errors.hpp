#pragma once

#include <stdexcept>
#include <string>

namespace privaudit {

enum class errc {
    // taxonomy
    unknown_relevance,
    invalid_rank_category_pair,
    empty_identifier,
    invalid_rank,
    // datasets
    missing_file,
    malformed_row,
    duplicate_keyword,
    duplicate_signature,
    incomplete_mapping,
    // container
    not_an_apk,
    missing_manifest,
    corrupt_zip_entry,
    // xml / resource table
    bad_magic,
    truncated_chunk,
    string_index_out_of_range,
    unbalanced_elements,
    malformed_xml,
    // dex
    unsupported_version,
    index_out_of_bounds,
    truncated_file,
    malformed_signature,
    // analyses
    not_a_manifest,
    no_analyzable_code,
    // comparison
    malformed_declaration,
    // general
    io_failure,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
            : std::runtime_error(std::string(errc_name(code)) + ": " + message),
              code_(code)
    {
    }

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace privaudit
