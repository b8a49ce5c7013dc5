// Writes a seeded synthetic ratings file in the Book-Crossing layout.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lptag/ingest.hpp"
#include "lptag/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic ratings corpus", "lptag-gen"};
  lptag::CorpusSpec spec;
  std::string out_path;
  app.add_option("--learners", spec.learners, "Number of learners")->capture_default_str();
  app.add_option("--resources", spec.resources, "Number of resources")->capture_default_str();
  app.add_option("--ratings", spec.ratings, "Number of rating rows")->capture_default_str();
  app.add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  app.add_option("--zero-fraction", spec.zero_fraction, "Share of rating-0 rows")->capture_default_str();
  app.add_option("--out", out_path, "Output ratings file")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << out_path << "' for writing\n";
    return 2;
  }
  try {
    lptag::render_ratings(out, lptag::generate_ratings(spec));
  } catch (const lptag::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return out ? 0 : 2;
}
