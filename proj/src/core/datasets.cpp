#include "llmnas/core/datasets.hpp"

#include "llmnas/core/errors.hpp"

namespace llmnas {

const std::vector<DatasetSpec>& builtin_datasets() {
  static const std::vector<DatasetSpec> kDatasets = {
      {"cifar10", 3, 32, 32, 10,
       "CIFAR-10 image classification: 32x32 RGB images of 10 object classes"},
      {"cifar100", 3, 32, 32, 100,
       "CIFAR-100 image classification: 32x32 RGB images of 100 fine-grained object classes"},
      {"imagenette", 3, 160, 160, 10,
       "ImageNette image classification: 160x160 RGB images of 10 easily classified ImageNet classes"},
  };
  return kDatasets;
}

DatasetSpec dataset_by_name(std::string_view name) {
  std::string known;
  for (const auto& d : builtin_datasets()) {
    if (d.name == name) return d;
    known += known.empty() ? d.name : ", " + d.name;
  }
  throw ConfigError("dataset: unknown name '" + std::string(name) + "' (known: " + known + ")");
}

}  // namespace llmnas
