#ifndef HYAG_BUILTINS_HPP
#define HYAG_BUILTINS_HPP

#include <string>
#include <vector>

namespace hyag {

struct BuiltinInfo {
    std::string name, description;
};

const std::vector<BuiltinInfo>& builtins();
// Scenario text of a built-in; throws std::out_of_range for unknown names.
const std::string& builtin_text(const std::string& name);

}  // namespace hyag

#endif
