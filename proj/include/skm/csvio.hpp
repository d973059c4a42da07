#ifndef SKM_CSVIO_HPP
#define SKM_CSVIO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "skm/bench.hpp"
#include "skm/bound.hpp"
#include "skm/core.hpp"

namespace skm {

// Full round-trip decimal formatting (17 significant digits) so CSV output is
// bit-faithful to the computed doubles.
std::string format_double(double v);
double parse_double(const std::string& s);  // throws on trailing garbage

// Numeric CSV rows -> points; `header` skips one leading line. Rejects ragged
// rows and non-finite values.
PointSet parse_csv_points(std::istream& in, bool header);

// Stream dump: `# skm-stream v1, d=<d>, N=<N>, period=<p>, epsilon=<e>, seed=<s>`
// followed by rows `batch_id,concept_id,x_0,...,x_{d-1}`.
struct StreamDump {
  std::size_t d = 0;
  std::size_t batch_n = 0;
  int period = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::vector<Batch> batches;
  std::vector<std::int64_t> concept_ids;  // parallel to batches
};

void write_stream_dump(std::ostream& out, const StreamDump& dump);
StreamDump read_stream_dump(std::istream& in);

void write_records_csv(std::ostream& out,
                       const std::vector<ExperimentRecord>& records);
// Parse errors report the 1-based line number.
std::vector<ExperimentRecord> read_records_csv(std::istream& in);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

void write_coverage_csv(std::ostream& out, const CoverageReport& report);

}  // namespace skm

#endif  // SKM_CSVIO_HPP
