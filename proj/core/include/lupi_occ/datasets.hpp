#pragma once

// Loaders and privileged group attributes for the benchmark datasets.

#include <filesystem>
#include <vector>

#include "lupi_occ/data.hpp"

namespace lupi_occ {

// UCI Statlog (Heart): 13 numeric attributes plus class (1 = absent,
// 2 = present), blank- or comma-separated, no header.
TabularDataset load_heart(const std::filesystem::path& path);

// Age (<40, 40-50, >=50; ages of 60 and over share the last group),
// Electrocardiographic (values 0, 1, 2) and Sex (0, 1).
std::vector<GroupAttribute> heart_group_attributes();

// UCI Abalone: sex (M/F/I, one-hot encoded), seven measurements and the ring
// count. Rings are binned into three classes: 1 (<= 8), 2 (9-10), 3 (>= 11).
TabularDataset load_abalone(const std::filesystem::path& path);
int abalone_class_of_rings(int rings) noexcept;

// Height < 0.15, Length < 0.5, Whole weight < 0.8, each split in two groups.
std::vector<GroupAttribute> abalone_group_attributes();

inline constexpr std::size_t kMnistImageFeatures = 100;
inline constexpr std::size_t kMnistPrivilegedFeatures = 21;

// Digit 5 vs 8 task with poetic-description features as privileged data.
//
// features_path: one row per image, 100 resized pixel values then a label
//                (5 or 8, or already-renamed classes 1 and 2); no header.
// priv_path:     21 integer-valued columns, one row per entry of the train
//                partition, in partition order.
// split_path:    lines "train: i j k ...", "validation: ...", "test: ..."
//                listing 0-based row indices of features_path.
//
// Class 1 is digit 5 and class 2 is digit 8.
OccTask load_mnist_task(const std::filesystem::path& features_path,
                        const std::filesystem::path& priv_path,
                        const std::filesystem::path& split_path, int target_class);

}  // namespace lupi_occ
