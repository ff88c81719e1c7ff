#include "privaudit/ui_analysis.hpp"

#include <algorithm>

namespace privaudit {

namespace {

// Input-type masks (android.text.InputType).
constexpr std::uint32_t kClassMask = 0x0000000f;
constexpr std::uint32_t kVariationMask = 0x00000ff0;
constexpr std::uint32_t kClassText = 1;
constexpr std::uint32_t kClassNumber = 2;
constexpr std::uint32_t kClassPhone = 3;
constexpr std::uint32_t kVariationPassword = 0x80;
constexpr std::uint32_t kVariationVisiblePassword = 0x90;
constexpr std::uint32_t kVariationWebPassword = 0xe0;
constexpr std::uint32_t kVariationNumberPassword = 0x10;
constexpr std::uint32_t kVariationEmailAddress = 0x20;

bool is_password_input(std::uint32_t flags)
{
    std::uint32_t klass = flags & kClassMask;
    std::uint32_t variation = flags & kVariationMask;
    if (klass == kClassText) {
        return variation == kVariationPassword || variation == kVariationVisiblePassword
                || variation == kVariationWebPassword;
    }
    return klass == kClassNumber && variation == kVariationNumberPassword;
}

bool is_email_input(std::uint32_t flags)
{
    return (flags & kClassMask) == kClassText && (flags & kVariationMask) == kVariationEmailAddress;
}

bool is_phone_input(std::uint32_t flags)
{
    return (flags & kClassMask) == kClassPhone;
}

std::string_view last_dot_segment(std::string_view name)
{
    std::size_t dot = name.rfind('.');
    return dot == std::string_view::npos ? name : name.substr(dot + 1);
}

bool is_input_widget(const XmlElement& element)
{
    if (last_dot_segment(element.name).ends_with("EditText")) {
        return true;
    }
    return element.find_attribute("inputType") != nullptr;
}

bool is_text_view(const XmlElement& element)
{
    return last_dot_segment(element.name) == "TextView";
}

// Field ids carry no string value; the useful part is the trailing
// resource-name segment.
std::optional<std::string> id_leaf(const AttrValue& value, const ResourceTable* table)
{
    const auto* ref = std::get_if<ResRef>(&value);
    if (!ref) {
        return std::nullopt;
    }
    if (!ref->name.empty()) {
        return ref->leaf();
    }
    if (ref->id && table) {
        if (const ResourceTable::Entry* entry = table->find(*ref->id)) {
            ResRef named{std::nullopt, entry->name};
            return named.leaf();
        }
    }
    return std::nullopt;
}

bool refs_same_field(const AttrValue& label_for, const std::optional<std::string>& field_leaf,
                     const XmlAttribute* field_id_attr, const ResourceTable* table)
{
    const auto* ref = std::get_if<ResRef>(&label_for);
    if (!ref) {
        return false;
    }
    if (field_id_attr) {
        if (const auto* field_ref = std::get_if<ResRef>(&field_id_attr->value)) {
            if (ref->id && field_ref->id) {
                return *ref->id == *field_ref->id;
            }
        }
    }
    auto target_leaf = id_leaf(label_for, table);
    return target_leaf && field_leaf && *target_leaf == *field_leaf;
}

std::optional<std::uint32_t> input_type_bits(const XmlElement& element)
{
    const XmlAttribute* attr = element.find_attribute("inputType");
    if (!attr) {
        return std::nullopt;
    }
    if (const auto* flags = std::get_if<HexFlags>(&attr->value)) {
        return flags->bits;
    }
    if (const auto* value = std::get_if<IntValue>(&attr->value)) {
        return static_cast<std::uint32_t>(value->value);
    }
    return std::nullopt;
}

void visit_element(const XmlElement& element, const std::vector<XmlElement>* siblings,
                   std::size_t index_in_parent, const ResourceTable* table,
                   std::string_view layout_path, std::vector<InputFieldRecord>& out)
{
    if (is_input_widget(element)) {
        InputFieldRecord record;
        record.layout_path = std::string(layout_path);
        record.widget = element.name;

        if (const XmlAttribute* id_attr = element.find_attribute("id")) {
            record.field_id = id_leaf(id_attr->value, table);
        }
        record.input_type_flags = input_type_bits(element);
        if (const XmlAttribute* hint = element.find_attribute("hint")) {
            record.hint = resolve_string(hint->value, table);
        }

        if (siblings) {
            const XmlAttribute* id_attr = element.find_attribute("id");
            // (i) a sibling TextView labelled for this field
            for (const XmlElement& sib : *siblings) {
                if (&sib == &element || !is_text_view(sib)) {
                    continue;
                }
                const XmlAttribute* label_for = sib.find_attribute("labelFor");
                if (!label_for
                        || !refs_same_field(label_for->value, record.field_id, id_attr, table)) {
                    continue;
                }
                if (const XmlAttribute* text = sib.find_attribute("text")) {
                    record.label_text = resolve_string(text->value, table);
                }
                break;
            }
            // (ii) the immediately preceding sibling TextView
            if (!record.label_text && index_in_parent > 0) {
                const XmlElement& prev = (*siblings)[index_in_parent - 1];
                if (is_text_view(prev)) {
                    if (const XmlAttribute* text = prev.find_attribute("text")) {
                        record.label_text = resolve_string(text->value, table);
                    }
                }
            }
        }

        if (record.field_id || record.input_type_flags || record.hint || record.label_text) {
            out.push_back(std::move(record));
        }
    }

    for (std::size_t i = 0; i < element.children.size(); ++i) {
        visit_element(element.children[i], &element.children, i, table, layout_path, out);
    }
}

struct StageMatch {
    PrivacyLabel label;
    IdentifierTag identifier;
    std::string token;
};

std::optional<StageMatch> best_match(const DatasetBundle& bundle,
                                     const std::vector<std::string>& tokens,
                                     const AppContext& context)
{
    if (tokens.empty()) {
        return std::nullopt;
    }
    std::vector<KeywordMatch> matches = bundle.match_keyword(tokens, context);
    if (matches.empty()) {
        return std::nullopt;
    }
    const KeywordMatch& best = *std::min_element(
            matches.begin(), matches.end(),
            [](const KeywordMatch& a, const KeywordMatch& b) { return keyword_match_precedes(a, b); });
    return StageMatch{best.label, best.identifier, best.matched_token};
}

} // namespace

std::string_view label_stage_name(LabelStage stage)
{
    switch (stage) {
    case LabelStage::InputType:
        return "input_type";
    case LabelStage::FieldId:
        return "field_id";
    case LabelStage::Hint:
        return "hint";
    case LabelStage::LabelText:
        return "label_text";
    }
    return "unknown";
}

std::vector<InputFieldRecord> extract_input_fields(const XmlDocument& doc,
                                                   const ResourceTable* table,
                                                   std::string_view layout_path)
{
    std::vector<InputFieldRecord> out;
    visit_element(doc.root, nullptr, 0, table, layout_path, out);
    return out;
}

std::optional<LabeledField> label_field(const InputFieldRecord& record,
                                        const DatasetBundle& bundle, const AppContext& context)
{
    std::vector<std::string> id_tokens =
            record.field_id ? tokenize_identifier(*record.field_id) : std::vector<std::string>{};
    std::vector<std::string> hint_tokens =
            record.hint ? tokenize_identifier(*record.hint) : std::vector<std::string>{};
    std::vector<std::string> label_tokens =
            record.label_text ? tokenize_identifier(*record.label_text) : std::vector<std::string>{};

    // Tokens from the whole record feed co-occurrence override triggers.
    AppContext field_context = context;
    field_context.co_tokens.insert(field_context.co_tokens.end(), id_tokens.begin(), id_tokens.end());
    field_context.co_tokens.insert(field_context.co_tokens.end(), hint_tokens.begin(),
                                   hint_tokens.end());
    field_context.co_tokens.insert(field_context.co_tokens.end(), label_tokens.begin(),
                                   label_tokens.end());

    LabeledField labeled;
    labeled.record = record;

    // Stage 1: the declared input type decides immediately.
    if (record.input_type_flags) {
        std::uint32_t flags = *record.input_type_flags;
        if (is_password_input(flags)) {
            labeled.label = make_label(3, DataCategory::Authentication);
            labeled.identifier = make_identifier("Password");
            // Any co-occurring payment keyword (PIN/TAN/CVV) refines the
            // password category.
            for (const KeywordMatch& match :
                 bundle.match_keyword(field_context.co_tokens, field_context)) {
                if (match.label.category == DataCategory::PaymentAuthentication) {
                    labeled.label = match.label;
                    labeled.matched_token = match.matched_token;
                    break;
                }
            }
            labeled.decided_by = LabelStage::InputType;
            return labeled;
        }
        if (is_email_input(flags)) {
            labeled.label = make_label(1, DataCategory::PersonalInformation);
            labeled.identifier = make_identifier("Email address");
            labeled.decided_by = LabelStage::InputType;
            return labeled;
        }
        if (is_phone_input(flags)) {
            labeled.label = make_label(1, DataCategory::PersonalInformation);
            labeled.identifier = make_identifier("Phone number");
            labeled.decided_by = LabelStage::InputType;
            return labeled;
        }
    }

    struct Stage {
        LabelStage stage;
        const std::vector<std::string>* tokens;
    };
    const Stage stages[] = {
            {LabelStage::FieldId, &id_tokens},
            {LabelStage::Hint, &hint_tokens},
            {LabelStage::LabelText, &label_tokens},
    };
    for (const Stage& stage : stages) {
        if (auto match = best_match(bundle, *stage.tokens, field_context)) {
            labeled.label = match->label;
            labeled.identifier = match->identifier;
            labeled.decided_by = stage.stage;
            labeled.matched_token = match->token;
            return labeled;
        }
    }
    return std::nullopt;
}

UiAnalysis analyze_layouts(const AppPackage& package, const DatasetBundle& bundle,
                           const AppContext& context)
{
    UiAnalysis analysis;

    ResourceTable table;
    const ResourceTable* table_ptr = nullptr;
    if (package.resource_table) {
        try {
            table = parse_resource_table(package.resource_table->data);
            table_ptr = &table;
        }
        catch (const Error& e) {
            analysis.warnings.push_back(std::string(package.resource_table->path) + ": "
                                        + e.what());
        }
    }

    for (const PackageEntry& layout : package.layouts) {
        XmlDocument doc;
        try {
            if (looks_like_binary_xml(layout.data)) {
                doc = parse_binary_xml(layout.data);
            }
            else {
                std::string_view text(reinterpret_cast<const char*>(layout.data.data()),
                                      layout.data.size());
                doc = parse_plain_xml(text);
            }
        }
        catch (const Error& e) {
            analysis.warnings.push_back(layout.path + ": " + e.what());
            continue;
        }

        for (const InputFieldRecord& record :
             extract_input_fields(doc, table_ptr, layout.path)) {
            if (auto labeled = label_field(record, bundle, context)) {
                analysis.fields.push_back(std::move(*labeled));
            }
        }
    }
    return analysis;
}

} // namespace privaudit
