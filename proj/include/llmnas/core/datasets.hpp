#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "llmnas/core/types.hpp"

namespace llmnas {

// Built-in image classification targets: cifar10, cifar100, imagenette.
const std::vector<DatasetSpec>& builtin_datasets();

/// Looks up a built-in dataset by name. Throws ConfigError listing the
/// known names when `name` is not registered.
DatasetSpec dataset_by_name(std::string_view name);

}  // namespace llmnas
