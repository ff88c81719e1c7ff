#include "unicode.hpp"

#include <vector>

namespace privaudit::detail {

namespace {

constexpr std::uint32_t kReplacement = 0xFFFD;

bool is_high_surrogate(std::uint32_t unit)
{
    return unit >= 0xD800 && unit <= 0xDBFF;
}

bool is_low_surrogate(std::uint32_t unit)
{
    return unit >= 0xDC00 && unit <= 0xDFFF;
}

} // namespace

void append_utf8(std::string& out, std::uint32_t cp)
{
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    }
    else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string utf16_to_utf8(std::span<const std::uint16_t> units, bool& invalid)
{
    std::string out;
    out.reserve(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) {
        std::uint32_t unit = units[i];
        if (is_high_surrogate(unit)) {
            if (i + 1 < units.size() && is_low_surrogate(units[i + 1])) {
                std::uint32_t cp = 0x10000 + ((unit - 0xD800) << 10) + (units[i + 1] - 0xDC00);
                append_utf8(out, cp);
                ++i;
            }
            else {
                append_utf8(out, kReplacement);
                invalid = true;
            }
        }
        else if (is_low_surrogate(unit)) {
            append_utf8(out, kReplacement);
            invalid = true;
        }
        else {
            append_utf8(out, unit);
        }
    }
    return out;
}

std::string sanitize_utf8(std::string_view text, bool& invalid)
{
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char lead = static_cast<unsigned char>(text[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (lead < 0x80) {
            len = 1;
            cp = lead;
        }
        else if ((lead & 0xE0) == 0xC0) {
            len = 2;
            cp = lead & 0x1F;
        }
        else if ((lead & 0xF0) == 0xE0) {
            len = 3;
            cp = lead & 0x0F;
        }
        else if ((lead & 0xF8) == 0xF0) {
            len = 4;
            cp = lead & 0x07;
        }
        else {
            append_utf8(out, kReplacement);
            invalid = true;
            ++i;
            continue;
        }

        if (i + len > text.size()) {
            append_utf8(out, kReplacement);
            invalid = true;
            break;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            unsigned char cont = static_cast<unsigned char>(text[i + k]);
            if ((cont & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (cont & 0x3F);
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            append_utf8(out, kReplacement);
            invalid = true;
            ++i;
            continue;
        }
        append_utf8(out, cp);
        i += len;
    }
    return out;
}

std::string mutf8_to_utf8(std::span<const std::byte> data, std::size_t& consumed, bool& invalid)
{
    std::vector<std::uint16_t> units;
    std::size_t i = 0;
    while (i < data.size()) {
        unsigned char b0 = static_cast<unsigned char>(data[i]);
        if (b0 == 0) {
            ++i;
            break;
        }
        if (b0 < 0x80) {
            units.push_back(b0);
            ++i;
        }
        else if ((b0 & 0xE0) == 0xC0 && i + 1 < data.size()
                 && (static_cast<unsigned char>(data[i + 1]) & 0xC0) == 0x80) {
            unsigned char b1 = static_cast<unsigned char>(data[i + 1]);
            units.push_back(static_cast<std::uint16_t>(((b0 & 0x1F) << 6) | (b1 & 0x3F)));
            i += 2;
        }
        else if ((b0 & 0xF0) == 0xE0 && i + 2 < data.size()
                 && (static_cast<unsigned char>(data[i + 1]) & 0xC0) == 0x80
                 && (static_cast<unsigned char>(data[i + 2]) & 0xC0) == 0x80) {
            unsigned char b1 = static_cast<unsigned char>(data[i + 1]);
            unsigned char b2 = static_cast<unsigned char>(data[i + 2]);
            units.push_back(static_cast<std::uint16_t>(((b0 & 0x0F) << 12) | ((b1 & 0x3F) << 6)
                                                       | (b2 & 0x3F)));
            i += 3;
        }
        else {
            units.push_back(static_cast<std::uint16_t>(kReplacement));
            invalid = true;
            ++i;
        }
    }
    consumed = i;
    return utf16_to_utf8(units, invalid);
}

} // namespace privaudit::detail
