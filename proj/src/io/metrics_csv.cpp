#include "simm/io/metrics_csv.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include "simm/errors.hpp"
#include "simm/io/checkpoint.hpp"

namespace simm {

namespace {

void put_double(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  out.append(buf.data(), ptr);
}

}  // namespace

std::string metrics_header(std::size_t chemicals) {
  std::string h = "step,alive_fraction,total_energy,mean_energy";
  for (std::size_t c = 1; c <= chemicals; ++c) h += ",chem_total_" + std::to_string(c);
  h += ",species_proxy,ms_per_step\n";
  return h;
}

std::string metrics_row(const MetricsRecord& r, std::size_t chemicals) {
  std::string out = std::to_string(r.step);
  out += ',';
  put_double(out, r.alive_fraction);
  out += ',';
  put_double(out, r.total_energy);
  out += ',';
  put_double(out, r.mean_energy);
  for (std::size_t c = 0; c < chemicals; ++c) {
    out += ',';
    put_double(out, c < r.chem_totals.size() ? r.chem_totals[c] : 0.0);
  }
  out += ',';
  out += std::to_string(r.species_proxy);
  out += ',';
  put_double(out, r.ms_per_step);
  out += '\n';
  return out;
}

void export_metrics(const std::vector<MetricsRecord>& records, std::size_t chemicals,
                    const std::string& path) {
  std::string text = metrics_header(chemicals);
  for (const auto& r : records) text += metrics_row(r, chemicals);
  write_file_atomic(path, text);
}

MetricsWriter::MetricsWriter(std::string path, std::size_t chemicals)
    : path_(std::move(path)), chemicals_(chemicals) {
  write_file_atomic(path_, metrics_header(chemicals_));
}

MetricsWriter::~MetricsWriter() {
  try {
    flush();
  } catch (...) {
  }
}

void MetricsWriter::append(const MetricsRecord& record) { pending_ += metrics_row(record, chemicals_); }

void MetricsWriter::flush() {
  if (pending_.empty()) return;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to '" + path_ + "'");
  out.write(pending_.data(), static_cast<std::streamsize>(pending_.size()));
  out.flush();
  if (!out) throw IoError("write failed for '" + path_ + "'");
  pending_.clear();
}

}  // namespace simm
