#include "nsdyn/drill_dc.hpp"
#include "nsdyn/drill_induction.hpp"
#include "nsdyn/error.hpp"
#include "nsdyn/model.hpp"
#include "nsdyn/tora.hpp"

#include <array>
#include <sstream>

namespace nsdyn {

namespace {
const std::array<std::string, 3> kModelNames{"tora", "drill_dc", "drill_induction"};

[[noreturn]] void unknown_model(std::string_view name) {
    std::ostringstream msg;
    msg << "unknown model '" << name << "' (expected tora, drill_dc or drill_induction)";
    throw ConfigError(msg.str());
}
}  // namespace

std::span<const std::string> model_names() noexcept { return kModelNames; }

ParamTable default_params(std::string_view name) {
    if (name == "tora") return tora_param_table();
    if (name == "drill_dc") return drill_dc_param_table();
    if (name == "drill_induction") return drill_induction_param_table();
    unknown_model(name);
}

ModelPtr build_model(std::string_view name, const ParamTable& params) {
    if (name == "tora") return std::make_shared<ToraModel>(params);
    if (name == "drill_dc") return std::make_shared<DrillDcModel>(params);
    if (name == "drill_induction") return std::make_shared<DrillInductionModel>(params);
    unknown_model(name);
}

ModelPtr build_model(std::string_view name) { return build_model(name, default_params(name)); }

}  // namespace nsdyn
