#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "privaudit/errors.hpp"

namespace privaudit {

/// A referenced method in JVM descriptor form, the match key between DEX
/// method tables and the identifier API dataset.
struct MethodRef {
    std::string class_descriptor; // "Lpkg/Cls;"
    std::string name;
    std::string proto;            // "(paramDescriptors)returnDescriptor"

    friend auto operator<=>(const MethodRef&, const MethodRef&) = default;
};

/// Converts a dataset signature "pkg.Cls: ret name(p1,p2)" into descriptor
/// form. Generic type arguments are stripped before conversion. Throws
/// malformed_signature.
MethodRef signature_to_ref(std::string_view signature);

/// Inverse of signature_to_ref, used for reporting.
std::string ref_to_signature(const MethodRef& ref);

/// Dotted Java type name ("int", "java.lang.String[]") to descriptor.
std::string type_name_to_descriptor(std::string_view name);

/// Descriptor ("I", "[Ljava/lang/String;") back to a dotted type name.
std::string descriptor_to_type_name(std::string_view descriptor);

} // namespace privaudit
