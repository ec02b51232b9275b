#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "germforge/germforge.hpp"

int main(int argc, char** argv) {
  CLI::App app{"germ-forge: exact certificates for integrable deformations of d(f)"};

  std::string task_file;
  std::string certificate_path;
  int degree = -1;
  int torder = -1;
  bool verbose = false;

  app.add_option("task-file", task_file, "problem file to run")->required();
  app.add_option("--certificate", certificate_path,
                 "write the certificate document (JSON) to this path");
  app.add_option("--degree", degree, "override the truncation degree D");
  app.add_option("--torder", torder, "override the t-order K");
  app.add_flag("--verbose", verbose, "include intermediate data in the output");

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(task_file);
  if (!in) {
    std::cerr << "germ-forge: cannot open '" << task_file << "'\n";
    return 1;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  germforge::RunOptions opts;
  if (degree > 0) opts.degree = degree;
  if (torder > 0) opts.torder = torder;
  opts.verbose = verbose;

  try {
    germforge::TaskOutcome outcome = germforge::run_problem_text(buffer.str(), opts);
    std::cout << outcome.human_text;
    if (!certificate_path.empty()) {
      std::ofstream out(certificate_path);
      if (!out) {
        std::cerr << "germ-forge: cannot write '" << certificate_path << "'\n";
        return 1;
      }
      out << outcome.certificate.dump(2) << "\n";
    }
    return outcome.exit_code;
  } catch (const germforge::ParseError& err) {
    std::cerr << "germ-forge: parse error at " << err.what() << "\n";
    return 1;
  } catch (const germforge::ElaborationError& err) {
    std::cerr << "germ-forge: " << err.what() << "\n";
    return 1;
  } catch (const germforge::runner::TaskError& err) {
    std::cerr << "germ-forge: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "germ-forge: internal error: " << err.what() << "\n";
    return 1;
  }
}
