#include "privaudit/method_ref.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

namespace privaudit {

namespace {

constexpr std::array<std::pair<std::string_view, char>, 9> kPrimitives = {{
        {"void", 'V'},
        {"boolean", 'Z'},
        {"byte", 'B'},
        {"short", 'S'},
        {"char", 'C'},
        {"int", 'I'},
        {"long", 'J'},
        {"float", 'F'},
        {"double", 'D'},
}};

std::string trim(std::string_view s)
{
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
        --end;
    }
    return std::string(s.substr(begin, end - begin));
}

// Drops balanced <...> generic arguments: "List<Map<K,V>>[]" -> "List[]".
std::string strip_generics(std::string_view name)
{
    std::string out;
    int depth = 0;
    for (char c : name) {
        if (c == '<') {
            ++depth;
        }
        else if (c == '>') {
            if (depth > 0) {
                --depth;
            }
        }
        else if (depth == 0) {
            out.push_back(c);
        }
    }
    return out;
}

} // namespace

std::string type_name_to_descriptor(std::string_view raw)
{
    std::string name = trim(strip_generics(raw));
    if (name.empty()) {
        raise(errc::malformed_signature, "empty type name");
    }

    std::string prefix;
    if (name.ends_with("...")) {
        // Varargs compile to an array parameter.
        name.resize(name.size() - 3);
        prefix = "[";
    }
    while (name.ends_with("[]")) {
        name.resize(name.size() - 2);
        prefix += '[';
    }
    name = trim(name);
    if (name.empty()) {
        raise(errc::malformed_signature, "array of nothing in '" + std::string(raw) + "'");
    }

    for (const auto& [word, desc] : kPrimitives) {
        if (name == word) {
            return prefix + desc;
        }
    }

    std::string body = name;
    std::replace(body.begin(), body.end(), '.', '/');
    return prefix + "L" + body + ";";
}

std::string descriptor_to_type_name(std::string_view descriptor)
{
    std::size_t dims = 0;
    while (dims < descriptor.size() && descriptor[dims] == '[') {
        ++dims;
    }
    std::string_view base = descriptor.substr(dims);
    if (base.empty()) {
        raise(errc::malformed_signature, "empty descriptor");
    }

    std::string name;
    if (base.front() == 'L' && base.back() == ';') {
        name.assign(base.substr(1, base.size() - 2));
        std::replace(name.begin(), name.end(), '/', '.');
    }
    else if (base.size() == 1) {
        for (const auto& [word, desc] : kPrimitives) {
            if (desc == base.front()) {
                name = word;
                break;
            }
        }
    }
    if (name.empty()) {
        raise(errc::malformed_signature, "bad descriptor '" + std::string(descriptor) + "'");
    }
    for (std::size_t i = 0; i < dims; ++i) {
        name += "[]";
    }
    return name;
}

MethodRef signature_to_ref(std::string_view signature)
{
    std::string text = trim(signature);
    std::size_t colon = text.find(':');
    if (colon == std::string::npos || colon == 0) {
        raise(errc::malformed_signature, "missing 'Class:' in '" + text + "'");
    }
    std::string class_name = trim(text.substr(0, colon));

    std::size_t open = text.find('(', colon);
    std::size_t close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        raise(errc::malformed_signature, "missing parameter list in '" + text + "'");
    }

    std::string ret_and_name = trim(text.substr(colon + 1, open - colon - 1));
    std::string stripped = strip_generics(ret_and_name);
    std::size_t space = stripped.rfind(' ');
    if (space == std::string::npos) {
        raise(errc::malformed_signature, "missing return type in '" + text + "'");
    }
    std::string return_type = trim(stripped.substr(0, space));
    std::string method_name = trim(stripped.substr(space + 1));
    if (method_name.empty() || return_type.empty()) {
        raise(errc::malformed_signature, "missing method name in '" + text + "'");
    }

    std::string proto = "(";
    std::string params = text.substr(open + 1, close - open - 1);
    params = strip_generics(params);
    if (!trim(params).empty()) {
        std::size_t start = 0;
        while (start <= params.size()) {
            std::size_t comma = params.find(',', start);
            std::string piece = comma == std::string::npos
                    ? params.substr(start)
                    : params.substr(start, comma - start);
            proto += type_name_to_descriptor(piece);
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
    }
    proto += ')';
    proto += type_name_to_descriptor(return_type);

    return MethodRef{type_name_to_descriptor(class_name), std::move(method_name),
                     std::move(proto)};
}

std::string ref_to_signature(const MethodRef& ref)
{
    std::size_t close = ref.proto.rfind(')');
    if (ref.proto.empty() || ref.proto.front() != '(' || close == std::string::npos) {
        raise(errc::malformed_signature, "bad proto '" + ref.proto + "'");
    }

    std::string out = descriptor_to_type_name(ref.class_descriptor);
    out += ": ";
    out += descriptor_to_type_name(ref.proto.substr(close + 1));
    out += ' ';
    out += ref.name;
    out += '(';

    std::string_view params(ref.proto);
    params = params.substr(1, close - 1);
    bool first = true;
    std::size_t pos = 0;
    while (pos < params.size()) {
        std::size_t start = pos;
        while (pos < params.size() && params[pos] == '[') {
            ++pos;
        }
        if (pos >= params.size()) {
            raise(errc::malformed_signature, "bad proto '" + ref.proto + "'");
        }
        if (params[pos] == 'L') {
            std::size_t semi = params.find(';', pos);
            if (semi == std::string::npos) {
                raise(errc::malformed_signature, "bad proto '" + ref.proto + "'");
            }
            pos = semi + 1;
        }
        else {
            ++pos;
        }
        if (!first) {
            out += ',';
        }
        out += descriptor_to_type_name(params.substr(start, pos - start));
        first = false;
    }
    out += ')';
    return out;
}

} // namespace privaudit
