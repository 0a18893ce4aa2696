#pragma once

#include <string>
#include <vector>

namespace bezierflow {

struct VerifyOptions {
    /// Feeds non-monotone control points (bypassing validation) into the
    /// endpoint-preservation property, which must then fail.
    bool inject_nonmonotone_points = false;
};

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Names of all registered properties, in execution order.
std::vector<std::string> property_names();

/// Runs every registered property. Exceptions inside a property count as a
/// failure of that property.
std::vector<PropertyResult> run_properties(const VerifyOptions& opts = {});

}  // namespace bezierflow
