#include "core/tensor_io.hpp"

#include <filesystem>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace fel::io {

namespace fs = std::filesystem;
using nlohmann::json;

void write_tensor(const std::string& path, const ad::Mat& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  json header = {{"count", m.rows()}, {"dim", m.cols()}};
  out << header.dump() << "\n";
  std::vector<float> buf(static_cast<std::size_t>(m.size()));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      buf[k++] = static_cast<float>(m(r, c));
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
}

ad::Mat read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw Error(ErrorCode::IoError, "missing header in " + path);
  }
  json header = json::parse(header_line, nullptr, false);
  if (header.is_discarded()) {
    throw Error(ErrorCode::IoError, "bad header in " + path);
  }
  Eigen::Index rows = header.at("count").get<Eigen::Index>();
  Eigen::Index cols = header.at("dim").get<Eigen::Index>();
  std::vector<float> buf(static_cast<std::size_t>(rows * cols));
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!in) throw Error(ErrorCode::IoError, "truncated tensor in " + path);
  ad::Mat m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = static_cast<double>(buf[k++]);
    }
  }
  return m;
}

void write_embeddings(const std::string& path, const ad::Mat& m,
                      const std::vector<std::string>& ids) {
  if (static_cast<Eigen::Index>(ids.size()) != m.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "embedding ids vs rows");
  }
  write_tensor(path, m);
  std::ofstream out(path + ".ids");
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path + ".ids");
  for (const auto& id : ids) out << id << "\n";
}

void save_params(const std::string& dir, const model::ParamStore& store) {
  fs::create_directories(fs::path(dir) / "tensors");
  for (const auto& p : store.all()) {
    write_tensor((fs::path(dir) / "tensors" / (p->name + ".bin")).string(),
                 p->value);
  }
}

void load_params(const std::string& dir, model::ParamStore& store) {
  for (const auto& p : store.all()) {
    std::string path = (fs::path(dir) / "tensors" / (p->name + ".bin")).string();
    ad::Mat m = read_tensor(path);
    if (m.rows() != p->value.rows() || m.cols() != p->value.cols()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "tensor shape mismatch for " + p->name);
    }
    p->value = std::move(m);
  }
}

}  // namespace fel::io
