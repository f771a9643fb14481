#pragma once

#include <string>
#include <vector>

#include "ganaudit/nn.hpp"

namespace ganaudit {

// Little-endian container for named float32 arrays plus a JSON metadata
// blob. Layout: magic, format version, metadata, then each array as
// (name, length, payload).
struct NamedArray {
  std::string name;
  std::vector<float> values;
};

void write_array_container(const std::string& path, const std::string& meta_json,
                           const std::vector<NamedArray>& arrays);

struct ArrayContainer {
  std::string meta_json;
  std::vector<NamedArray> arrays;

  const NamedArray& find(const std::string& name) const;
};

ArrayContainer read_array_container(const std::string& path);

// Copies every array of `params` into the container list (appending), and
// back again on restore. Lengths must match exactly on restore.
void snapshot_params(const std::vector<ParamRef<float>>& params,
                     std::vector<NamedArray>& out);
void restore_params(const std::vector<ParamRef<float>>& params,
                    const ArrayContainer& container);

}  // namespace ganaudit
