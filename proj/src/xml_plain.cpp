#include "privaudit/axml.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <vector>

namespace privaudit {

namespace {

class PlainXmlParser {
public:
    explicit PlainXmlParser(std::string_view text) : text_(text) {}

    XmlDocument parse()
    {
        // UTF-8 BOM
        if (text_.substr(pos_, 3) == "\xEF\xBB\xBF") {
            pos_ += 3;
        }
        skip_misc();
        if (eof() || peek() != '<') {
            fail("expected a root element");
        }
        XmlElement root = parse_element();
        skip_misc();
        if (!eof()) {
            fail("content after the root element");
        }
        return XmlDocument{std::move(root)};
    }

private:
    [[noreturn]] void fail(const std::string& reason) const
    {
        raise(errc::malformed_xml, "line " + std::to_string(line_) + ": " + reason);
    }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char take()
    {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
        }
        return c;
    }

    bool consume(std::string_view token)
    {
        if (text_.substr(pos_, token.size()) != token) {
            return false;
        }
        for (std::size_t i = 0; i < token.size(); ++i) {
            take();
        }
        return true;
    }

    void skip_whitespace()
    {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) {
            take();
        }
    }

    // Whitespace, comments, and processing instructions between elements.
    void skip_misc()
    {
        while (true) {
            skip_whitespace();
            if (consume("<!--")) {
                while (!eof() && !consume("-->")) {
                    take();
                }
                continue;
            }
            if (text_.substr(pos_, 2) == "<!") {
                fail("DTD declarations are not allowed");
            }
            if (text_.substr(pos_, 2) == "<?") {
                while (!eof() && !consume("?>")) {
                    take();
                }
                continue;
            }
            break;
        }
    }

    std::string parse_name()
    {
        std::string name;
        while (!eof()) {
            char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-'
                    || c == '.') {
                name.push_back(take());
            }
            else {
                break;
            }
        }
        if (name.empty()) {
            fail("expected a name");
        }
        return name;
    }

    void append_entity(std::string& out)
    {
        take(); // '&'
        std::string entity;
        while (!eof() && peek() != ';' && entity.size() < 12) {
            entity.push_back(take());
        }
        if (eof() || peek() != ';') {
            fail("unterminated entity reference");
        }
        take();
        if (entity == "amp") {
            out.push_back('&');
        }
        else if (entity == "lt") {
            out.push_back('<');
        }
        else if (entity == "gt") {
            out.push_back('>');
        }
        else if (entity == "quot") {
            out.push_back('"');
        }
        else if (entity == "apos") {
            out.push_back('\'');
        }
        else if (!entity.empty() && entity.front() == '#') {
            long cp = entity[1] == 'x' || entity[1] == 'X'
                    ? std::strtol(entity.c_str() + 2, nullptr, 16)
                    : std::strtol(entity.c_str() + 1, nullptr, 10);
            if (cp <= 0 || cp > 0x10FFFF) {
                fail("bad character reference &" + entity + ";");
            }
            // Minimal UTF-8 append for character references.
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
        else {
            // No custom or external entities.
            fail("unknown entity &" + entity + ";");
        }
    }

    std::string parse_quoted_value()
    {
        char quote = take();
        std::string value;
        while (true) {
            if (eof()) {
                fail("unterminated attribute value");
            }
            if (peek() == quote) {
                take();
                break;
            }
            if (peek() == '&') {
                append_entity(value);
            }
            else {
                value.push_back(take());
            }
        }
        return value;
    }

    XmlElement parse_element()
    {
        take(); // '<'
        XmlElement element;
        element.name = parse_name();

        struct RawAttr {
            std::string name;
            std::string value;
        };
        std::vector<RawAttr> raw_attrs;

        bool self_closing = false;
        while (true) {
            skip_whitespace();
            if (eof()) {
                fail("unterminated start tag <" + element.name + ">");
            }
            if (consume("/>")) {
                self_closing = true;
                break;
            }
            if (peek() == '>') {
                take();
                break;
            }
            RawAttr attr;
            attr.name = parse_name();
            skip_whitespace();
            if (eof() || peek() != '=') {
                fail("attribute '" + attr.name + "' has no value");
            }
            take();
            skip_whitespace();
            if (eof() || (peek() != '"' && peek() != '\'')) {
                fail("attribute '" + attr.name + "' value is not quoted");
            }
            attr.value = parse_quoted_value();
            raw_attrs.push_back(std::move(attr));
        }

        // xmlns declarations scope namespace prefixes; they are consumed
        // here rather than kept as attributes, matching the binary model.
        std::map<std::string, std::string> local_prefixes;
        for (const RawAttr& attr : raw_attrs) {
            if (attr.name == "xmlns") {
                local_prefixes[""] = attr.value;
            }
            else if (attr.name.starts_with("xmlns:")) {
                local_prefixes[attr.name.substr(6)] = attr.value;
            }
        }
        for (const auto& [prefix, uri] : local_prefixes) {
            prefix_stack_.emplace_back(prefix, uri);
        }

        for (RawAttr& attr : raw_attrs) {
            if (attr.name == "xmlns" || attr.name.starts_with("xmlns:")) {
                continue;
            }
            XmlAttribute out;
            std::size_t colon = attr.name.find(':');
            std::string local = attr.name;
            if (colon != std::string::npos) {
                std::string prefix = attr.name.substr(0, colon);
                local = attr.name.substr(colon + 1);
                if (auto uri = lookup_prefix(prefix)) {
                    out.namespace_uri = *uri;
                }
                else if (prefix == "android") {
                    out.namespace_uri = std::string(kAndroidNamespaceUri);
                }
                else {
                    local = attr.name; // unknown prefix: keep verbatim
                }
            }
            out.name = local;
            out.value = classify_value(local, attr.value);
            element.attributes.push_back(std::move(out));
        }

        if (!self_closing) {
            std::string text;
            while (true) {
                if (eof()) {
                    fail("missing </" + element.name + ">");
                }
                if (peek() == '<') {
                    if (consume("<!--")) {
                        while (!eof() && !consume("-->")) {
                            take();
                        }
                        continue;
                    }
                    if (consume("<![CDATA[")) {
                        while (!eof() && !consume("]]>")) {
                            text.push_back(take());
                        }
                        continue;
                    }
                    if (text_.substr(pos_, 2) == "<!") {
                        fail("DTD declarations are not allowed");
                    }
                    if (text_.substr(pos_, 2) == "<?") {
                        while (!eof() && !consume("?>")) {
                            take();
                        }
                        continue;
                    }
                    if (text_.substr(pos_, 2) == "</") {
                        take();
                        take();
                        std::string closing = parse_name();
                        if (closing != element.name) {
                            fail("expected </" + element.name + "> but found </" + closing + ">");
                        }
                        skip_whitespace();
                        if (eof() || take() != '>') {
                            fail("malformed closing tag </" + closing + ">");
                        }
                        break;
                    }
                    element.children.push_back(parse_element());
                }
                else if (peek() == '&') {
                    append_entity(text);
                }
                else {
                    text.push_back(take());
                }
            }
            std::size_t begin = text.find_first_not_of(" \t\r\n");
            if (begin != std::string::npos) {
                std::size_t end = text.find_last_not_of(" \t\r\n");
                element.text = text.substr(begin, end - begin + 1);
            }
        }

        for (std::size_t i = 0; i < local_prefixes.size(); ++i) {
            prefix_stack_.pop_back();
        }
        return element;
    }

    std::optional<std::string> lookup_prefix(const std::string& prefix) const
    {
        for (auto it = prefix_stack_.rbegin(); it != prefix_stack_.rend(); ++it) {
            if (it->first == prefix) {
                return it->second;
            }
        }
        return std::nullopt;
    }

    // Values stay strings except resource references, hex flag words, and
    // symbolic input types.
    static AttrValue classify_value(const std::string& local_name, const std::string& value)
    {
        if (value.size() > 1 && value.front() == '@') {
            std::string name = value.substr(1);
            if (!name.empty() && name.front() == '+') {
                name.erase(name.begin());
            }
            if (name.find('/') != std::string::npos) {
                return ResRef{std::nullopt, std::move(name)};
            }
            return StrValue{value};
        }
        if (value.size() > 2 && value[0] == '0' && (value[1] == 'x' || value[1] == 'X')) {
            char* end = nullptr;
            unsigned long bits = std::strtoul(value.c_str() + 2, &end, 16);
            if (end && *end == '\0' && bits <= 0xFFFFFFFFul) {
                return HexFlags{static_cast<std::uint32_t>(bits)};
            }
        }
        if (local_name == "inputType") {
            if (auto bits = input_type_flags_from_names(value)) {
                return HexFlags{*bits};
            }
        }
        return StrValue{value};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::vector<std::pair<std::string, std::string>> prefix_stack_;
};

} // namespace

XmlDocument parse_plain_xml(std::string_view text)
{
    PlainXmlParser parser(text);
    return parser.parse();
}

} // namespace privaudit
