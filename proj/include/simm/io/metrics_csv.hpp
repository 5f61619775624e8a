#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "simm/engine.hpp"

namespace simm {

/// step,alive_fraction,total_energy,mean_energy,chem_total_1..chem_total_N,species_proxy,ms_per_step
std::string metrics_header(std::size_t chemicals);
std::string metrics_row(const MetricsRecord& record, std::size_t chemicals);

/// Writes the header and one row per record; a header-only file when empty.
void export_metrics(const std::vector<MetricsRecord>& records, std::size_t chemicals,
                    const std::string& path);

/// Incremental CSV: rows are buffered and each flush appends them with a
/// single write.
class MetricsWriter {
 public:
  MetricsWriter(std::string path, std::size_t chemicals);
  ~MetricsWriter();

  MetricsWriter(const MetricsWriter&) = delete;
  MetricsWriter& operator=(const MetricsWriter&) = delete;

  void append(const MetricsRecord& record);
  void flush();

 private:
  std::string path_;
  std::size_t chemicals_;
  std::string pending_;
};

}  // namespace simm
