#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privaudit/axml.hpp"
#include "privaudit/datasets.hpp"
#include "privaudit/package.hpp"
#include "privaudit/taxonomy.hpp"

namespace privaudit {

/// A user-input field and the metadata the layout exposes for it. Records
/// with none of id/hint/label/inputType are dropped at extraction time.
struct InputFieldRecord {
    std::string layout_path;
    std::string widget; // element name
    std::optional<std::string> field_id;
    std::optional<std::uint32_t> input_type_flags;
    std::optional<std::string> hint;
    std::optional<std::string> label_text;

    friend bool operator==(const InputFieldRecord&, const InputFieldRecord&) = default;
};

/// Which precedence stage produced the label.
enum class LabelStage { InputType, FieldId, Hint, LabelText };

std::string_view label_stage_name(LabelStage stage);

struct LabeledField {
    InputFieldRecord record;
    PrivacyLabel label;
    IdentifierTag identifier;
    LabelStage decided_by = LabelStage::InputType;
    std::optional<std::string> matched_token;

    friend bool operator==(const LabeledField&, const LabeledField&) = default;
};

/// Extracts input fields: every element whose name's last dot-segment ends
/// in "EditText" plus any element with an android:inputType attribute.
/// Hint/label strings resolve through the resource table; the label text
/// comes from a labelFor-linked sibling TextView, else the immediately
/// preceding sibling TextView.
std::vector<InputFieldRecord> extract_input_fields(const XmlDocument& doc,
                                                   const ResourceTable* table,
                                                   std::string_view layout_path);

/// Labels one record by precedence: input type, field id, hint, label text.
/// Returns nullopt when no stage matches.
std::optional<LabeledField> label_field(const InputFieldRecord& record,
                                        const DatasetBundle& bundle, const AppContext& context);

struct UiAnalysis {
    std::vector<LabeledField> fields;
    std::vector<std::string> warnings; // per-layout failures, not fatal
};

/// Runs extraction and labeling over every layout in the package, in
/// (layout path, document order).
UiAnalysis analyze_layouts(const AppPackage& package, const DatasetBundle& bundle,
                           const AppContext& context);

} // namespace privaudit
