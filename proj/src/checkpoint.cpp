#include "ganaudit/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ganaudit/errors.hpp"

namespace ganaudit {

namespace {

constexpr char kMagic[4] = {'G', 'A', 'U', 'D'};
constexpr uint32_t kVersion = 1;

// The toolchain targets little-endian hosts only; raw writes are fine.
static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

void write_u32(std::ofstream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

uint32_t read_u32(std::ifstream& in, const std::string& path) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  if (in.gcount() != 4) throw CheckpointError("truncated checkpoint: " + path);
  return v;
}

}  // namespace

void write_array_container(const std::string& path, const std::string& meta_json,
                           const std::vector<NamedArray>& arrays) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint: " + path);
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<uint32_t>(meta_json.size()));
  out.write(meta_json.data(), static_cast<std::streamsize>(meta_json.size()));
  write_u32(out, static_cast<uint32_t>(arrays.size()));
  for (const auto& arr : arrays) {
    write_u32(out, static_cast<uint32_t>(arr.name.size()));
    out.write(arr.name.data(), static_cast<std::streamsize>(arr.name.size()));
    write_u32(out, static_cast<uint32_t>(arr.values.size()));
    out.write(reinterpret_cast<const char*>(arr.values.data()),
              static_cast<std::streamsize>(arr.values.size() * sizeof(float)));
  }
  if (!out) throw CheckpointError("short write: " + path);
}

ArrayContainer read_array_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
    throw CheckpointError("not a checkpoint file: " + path);
  uint32_t version = read_u32(in, path);
  if (version != kVersion)
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(version) + ": " + path);
  ArrayContainer container;
  uint32_t meta_len = read_u32(in, path);
  container.meta_json.resize(meta_len);
  in.read(container.meta_json.data(), meta_len);
  if (in.gcount() != static_cast<std::streamsize>(meta_len))
    throw CheckpointError("truncated checkpoint: " + path);
  uint32_t n_arrays = read_u32(in, path);
  container.arrays.resize(n_arrays);
  for (auto& arr : container.arrays) {
    uint32_t name_len = read_u32(in, path);
    arr.name.resize(name_len);
    in.read(arr.name.data(), name_len);
    if (in.gcount() != static_cast<std::streamsize>(name_len))
      throw CheckpointError("truncated checkpoint: " + path);
    uint32_t n = read_u32(in, path);
    arr.values.resize(n);
    in.read(reinterpret_cast<char*>(arr.values.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(n * sizeof(float)))
      throw CheckpointError("truncated checkpoint: " + path);
  }
  return container;
}

const NamedArray& ArrayContainer::find(const std::string& name) const {
  for (const auto& arr : arrays)
    if (arr.name == name) return arr;
  throw CheckpointError("checkpoint missing array: " + name);
}

void snapshot_params(const std::vector<ParamRef<float>>& params,
                     std::vector<NamedArray>& out) {
  for (const auto& p : params) out.push_back({p.name, *p.value});
}

void restore_params(const std::vector<ParamRef<float>>& params,
                    const ArrayContainer& container) {
  for (const auto& p : params) {
    const NamedArray& arr = container.find(p.name);
    if (arr.values.size() != p.value->size())
      throw CheckpointError("checkpoint array size mismatch for " + p.name);
    *p.value = arr.values;
  }
}

}  // namespace ganaudit
