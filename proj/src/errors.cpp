#include "privaudit/errors.hpp"

namespace privaudit {

const char* errc_name(errc code)
{
    switch (code) {
    case errc::unknown_relevance:
        return "UnknownRelevance";
    case errc::invalid_rank_category_pair:
        return "InvalidRankCategoryPair";
    case errc::empty_identifier:
        return "EmptyIdentifier";
    case errc::invalid_rank:
        return "InvalidRank";
    case errc::missing_file:
        return "MissingFile";
    case errc::malformed_row:
        return "MalformedRow";
    case errc::duplicate_keyword:
        return "DuplicateKeyword";
    case errc::duplicate_signature:
        return "DuplicateSignature";
    case errc::incomplete_mapping:
        return "IncompleteMapping";
    case errc::not_an_apk:
        return "NotAnApk";
    case errc::missing_manifest:
        return "MissingManifest";
    case errc::corrupt_zip_entry:
        return "CorruptZipEntry";
    case errc::bad_magic:
        return "BadMagic";
    case errc::truncated_chunk:
        return "TruncatedChunk";
    case errc::string_index_out_of_range:
        return "StringIndexOutOfRange";
    case errc::unbalanced_elements:
        return "UnbalancedElements";
    case errc::malformed_xml:
        return "MalformedXml";
    case errc::unsupported_version:
        return "UnsupportedVersion";
    case errc::index_out_of_bounds:
        return "IndexOutOfBounds";
    case errc::truncated_file:
        return "TruncatedFile";
    case errc::malformed_signature:
        return "MalformedSignature";
    case errc::not_a_manifest:
        return "NotAManifest";
    case errc::no_analyzable_code:
        return "NoAnalyzableCode";
    case errc::malformed_declaration:
        return "MalformedDeclaration";
    case errc::io_failure:
        return "IoFailure";
    }
    return "UnknownError";
}

} // namespace privaudit
