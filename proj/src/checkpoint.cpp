#include "wavecast/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace wavecast::ckpt {

namespace {

constexpr char kMagic[8] = {'W', 'C', 'C', 'K', 'P', 'T', '0', '1'};

void write_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  std::memcpy(buf, &v, 8);
  os.write(buf, 8);
}

std::uint64_t read_u64(std::istream& is) {
  char buf[8];
  is.read(buf, 8);
  std::uint64_t v;
  std::memcpy(&v, buf, 8);
  return v;
}

}  // namespace

void save_checkpoint(
    const std::string& path, const nlohmann::json& meta,
    const std::vector<std::pair<std::string, ad::Tensor>>& tensors) {
  nlohmann::json header = meta;
  nlohmann::json table = nlohmann::json::array();
  std::uint64_t total = 0;
  for (const auto& [name, t] : tensors) {
    table.push_back({{"name", name}, {"shape", t->shape}});
    total += t->size();
  }
  header["tensors"] = std::move(table);
  const std::string header_str = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CheckpointError("cannot open " + tmp + " for writing");
    os.write(kMagic, sizeof(kMagic));
    write_u64(os, header_str.size());
    os.write(header_str.data(),
             static_cast<std::streamsize>(header_str.size()));
    write_u64(os, total);
    for (const auto& [name, t] : tensors)
      os.write(reinterpret_cast<const char*>(t->data.data()),
               static_cast<std::streamsize>(t->data.size() * sizeof(double)));
    if (!os) throw CheckpointError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw CheckpointError("cannot rename " + tmp + " to " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw CheckpointError(path + " is not a checkpoint file");

  const std::uint64_t header_len = read_u64(is);
  std::string header_str(header_len, '\0');
  is.read(header_str.data(), static_cast<std::streamsize>(header_len));
  if (!is) throw CheckpointError(path + ": truncated header");

  Checkpoint out;
  try {
    out.meta = nlohmann::json::parse(header_str);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": bad header: " + e.what());
  }
  if (!out.meta.contains("tensors") || !out.meta["tensors"].is_array())
    throw CheckpointError(path + ": header lacks a tensor table");

  const std::uint64_t total = read_u64(is);
  std::uint64_t expected = 0;
  for (const auto& entry : out.meta["tensors"]) {
    NamedTensor t;
    t.name = entry.at("name").get<std::string>();
    t.shape = entry.at("shape").get<std::vector<std::size_t>>();
    t.values.resize(ad::numel(t.shape));
    expected += t.values.size();
    out.tensors.push_back(std::move(t));
  }
  if (expected != total)
    throw CheckpointError(path + ": value count " + std::to_string(total) +
                          " does not match the shape table (" +
                          std::to_string(expected) + ")");
  for (auto& t : out.tensors) {
    is.read(reinterpret_cast<char*>(t.values.data()),
            static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!is) throw CheckpointError(path + ": truncated values");
  }
  out.meta.erase("tensors");
  return out;
}

const NamedTensor& Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw CheckpointError("checkpoint has no tensor named '" + name + "'");
}

void atomic_write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CheckpointError("cannot open " + tmp + " for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw CheckpointError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw CheckpointError("cannot rename " + tmp + " to " + path);
}

}  // namespace wavecast::ckpt
