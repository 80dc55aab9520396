#pragma once

#include <optional>
#include <string_view>

namespace ldbj {

enum class OpType { XFX, XFY, YFX };

struct OperatorDef {
    int priority;
    OpType type;
};

// Fixed infix operator table; there are no prefix or user-defined operators.
inline std::optional<OperatorDef> infix_operator(std::string_view name) {
    if (name == ":-") return OperatorDef{1200, OpType::XFX};
    if (name == ";") return OperatorDef{1100, OpType::XFY};
    if (name == "->") return OperatorDef{1050, OpType::XFY};
    if (name == ",") return OperatorDef{1000, OpType::XFY};
    if (name == "=" || name == "is" || name == ">" || name == "<" || name == ">=" || name == "=<")
        return OperatorDef{700, OpType::XFX};
    if (name == "+" || name == "-") return OperatorDef{500, OpType::YFX};
    if (name == "*" || name == "//") return OperatorDef{400, OpType::YFX};
    return std::nullopt;
}

}  // namespace ldbj
