// Integration tests for the command-line surface: exit codes, file formats,
// and byte-identical reruns. Takes the binary path as argv[1].

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "carfin/io.hpp"
#include "carfin/states.hpp"

namespace {

int checks = 0, failures = 0;

void expect(bool cond, const std::string& what) {
    ++checks;
    if (!cond) {
        ++failures;
        std::cerr << "FAIL: " << what << "\n";
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int status;
    std::string out;
};

std::string cli;

RunResult run(const std::string& args) {
    std::string out_path = "/tmp/carfin_cli_out.txt";
    std::string cmd = cli + " " + args + " > " + out_path + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    int status = (rc >= 256) ? rc / 256 : rc;  // WEXITSTATUS without <sys/wait.h>
    return {status, slurp(out_path)};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-carfin>\n";
        return 2;
    }
    cli = argv[1];

    // count
    {
        auto r = run("count --m 2 --k 2 --N 20");
        expect(r.status == 0, "count exits 0");
        expect(r.out.find("0.194736842") != std::string::npos, "count prints the exact value");
        expect(r.out.find("0.2") != std::string::npos, "count prints the estimate");
    }
    {
        auto r = run("count --m 1 --k 1 --N 100");
        expect(r.status == 0, "count m=k=1 exits 0");
        expect(r.out.find("0.01") != std::string::npos, "count prints 0.01 twice");
    }
    expect(run("count --m 3 --k 3 --N 5").status == 1, "count domain violation exits 1");

    // classify
    {
        auto r = run("classify --mu 0.25");
        expect(r.status == 0, "classify exits 0");
        expect(r.out.find("III_lambda lambda=0.333333") != std::string::npos,
               "classify prints lambda = 1/3");
    }
    expect(run("classify --mu 0.5").out.find("II_1") != std::string::npos, "classify II_1");
    expect(run("classify --mu 1.0").out.find("I_infinity") != std::string::npos,
           "classify I_infinity");
    expect(run("classify --mu 1.5").status == 1, "classify out of range exits 1");

    // verify: determinism and the capacity code
    {
        auto r1 = run("verify --n 3 --seed 42");
        auto r2 = run("verify --n 3 --seed 42");
        expect(r1.status == 0, "verify exits 0");
        expect(r1.out == r2.out, "verify reruns are byte-identical");
        expect(r1.out.find("\"all_pass\": true") != std::string::npos, "verify passes");
        expect(r1.out.find("\"seed\": 42") != std::string::npos, "verify prints the seed");
    }
    {
        auto r = run("verify --n 1 --seed 7");
        expect(r.status == 0, "verify n=1 exits 0");
        expect(r.out.find("skipped") != std::string::npos, "verify n=1 notes skipped checks");
    }
    expect(run("verify --n 20").status == 4, "verify n=20 exits 4 (capacity)");

    // make-state + decompose + cluster
    {
        auto r = run("make-state --mu 0.3 --n 6 --out /tmp/carfin_prod.json");
        expect(r.status == 0, "make-state product exits 0");
        auto d = run("decompose --state /tmp/carfin_prod.json --out /tmp/carfin_prod.csv "
                     "--roundtrip");
        expect(d.status == 0, "decompose product exits 0");
        expect(d.out.find("\"residual\"") != std::string::npos, "report has residual");
        expect(d.out.find("\"battery_deviation\"") != std::string::npos,
               "report has battery deviation");
        expect(d.out.find("\"moments\"") != std::string::npos, "report has moments");
        expect(d.out.find("\"roundtrip\"") != std::string::npos, "report has roundtrip");
        std::string csv = slurp("/tmp/carfin_prod.csv");
        expect(csv.rfind("mu,weight", 0) == 0, "measure csv has the header");
        expect(csv.find("0.300000000000") != std::string::npos, "csv atom near 0.3");
        expect(csv.find("1.000000000000") != std::string::npos, "csv weight 1");
        auto d2 = run("decompose --state /tmp/carfin_prod.json --out /tmp/carfin_prod.csv "
                      "--roundtrip");
        expect(d.out == d2.out, "decompose reruns are byte-identical");
    }
    {
        auto r = run("make-state --mu 0.5 --n 4 --out /tmp/carfin_tau.json");
        expect(r.status == 0, "make-state trace state exits 0");
        auto d = run("decompose --state /tmp/carfin_tau.json --out /tmp/carfin_tau.csv");
        expect(d.status == 0, "decompose trace state exits 0");
        std::string csv = slurp("/tmp/carfin_tau.csv");
        expect(csv.find("0.500000000000,1.000000000000") != std::string::npos,
               "trace state recovers the midpoint atom");
    }
    {
        auto r = run("make-state --mixture 0.2:0.5,0.8:0.5 --n 6 --out /tmp/carfin_mix.json");
        expect(r.status == 0, "make-state mixture exits 0");
        auto d = run("decompose --state /tmp/carfin_mix.json --out /tmp/carfin_mix.csv");
        expect(d.status == 0, "decompose mixture exits 0");
        carfin::MixingMeasure measure = carfin::load_measure("/tmp/carfin_mix.csv");
        expect(measure.atoms.size() == 2, "mixture recovers two atoms");
        expect(std::abs(measure.atoms[0].mu - 0.2) < 0.01, "first atom near 0.2");
        expect(std::abs(measure.atoms[1].mu - 0.8) < 0.01, "second atom near 0.8");

        auto c = run("cluster --state /tmp/carfin_mix.json --stages 1");
        expect(c.status == 0, "cluster on mixture exits 0");
        expect(c.out.find("0.09") != std::string::npos, "mixture clustering defect 0.09");
    }
    {
        auto c = run("cluster --mu 0.3 --stages 2 --n 4");
        expect(c.status == 0, "cluster product exits 0");
        std::istringstream ss(c.out);
        std::string header;
        std::getline(ss, header);
        int stage;
        double defect;
        int rows = 0;
        while (ss >> stage >> defect) {
            expect(defect <= 1e-12, "product clustering defect is zero");
            ++rows;
        }
        expect(rows == 2, "cluster prints one row per stage");
        expect(run("cluster --mu 0.3 --stages 3 --n 4").status == 4,
               "cluster beyond capacity exits 4");
    }

    // non-symmetric state: precondition exit code 2
    {
        carfin::State skew;
        skew.n = 2;
        carfin::RVec diag(4);
        diag << 0.3 * 0.7, 0.3 * 0.3, 0.7 * 0.7, 0.7 * 0.3;
        skew.density = diag.cast<carfin::cx>().asDiagonal();
        carfin::save_state(skew, "/tmp/carfin_skew.json");
        expect(run("decompose --state /tmp/carfin_skew.json --out /tmp/carfin_skew.csv")
                       .status == 2,
               "decompose non-symmetric exits 2");
        expect(run("cluster --state /tmp/carfin_skew.json --stages 1").status == 2,
               "cluster non-symmetric exits 2");
    }

    // infeasible moments: symmetric half-filling state at n = 4 has
    // m_1 = 1/2 but m_2 = 1/6 < m_1^2, outside the Hausdorff cone
    {
        int n = 4;
        Eigen::Index d = carfin::pow2(n);
        carfin::Mat density = carfin::Mat::Zero(d, d);
        int count = 0;
        for (Eigen::Index s = 0; s < d; ++s) {
            int bits = 0;
            for (int b = 0; b < n; ++b) bits += int((s >> b) & 1);
            if (bits == n / 2) ++count;
        }
        for (Eigen::Index s = 0; s < d; ++s) {
            int bits = 0;
            for (int b = 0; b < n; ++b) bits += int((s >> b) & 1);
            if (bits == n / 2) density(s, s) = 1.0 / double(count);
        }
        carfin::save_state({n, density}, "/tmp/carfin_half.json");
        expect(run("decompose --state /tmp/carfin_half.json --out /tmp/carfin_half.csv")
                       .status == 3,
               "half-filling moments are infeasible: exit 3");
    }

    // malformed state file: exit 1
    {
        std::ofstream bad("/tmp/carfin_bad.json");
        bad << "{ not json";
        bad.close();
        expect(run("decompose --state /tmp/carfin_bad.json --out /tmp/x.csv").status == 1,
               "malformed state exits 1");
        expect(run("decompose --state /does/not/exist.json --out /tmp/x.csv").status == 1,
               "missing state exits 1");
    }

    // missing required alternatives exit 1
    expect(run("cluster --stages 1 --n 4").status == 1, "cluster without source exits 1");
    expect(run("make-state --n 4 --out /tmp/x.json").status == 1,
           "make-state without source exits 1");

    // oddness
    {
        auto r = run("oddness --n-list 1,3,5");
        expect(r.status == 0, "oddness exits 0");
        std::istringstream ss(r.out);
        std::string header;
        std::getline(ss, header);
        expect(header == "n,average,gns_compression,sqrt_bound", "oddness csv header");
        std::string line;
        int rows = 0;
        while (std::getline(ss, line)) {
            if (line.empty()) continue;
            ++rows;
            int n;
            double avg, comp, bound;
            std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &n, &avg, &comp, &bound);
            expect(std::abs(avg - 1.0 / n) < 1e-12, "oddness average is 1/n");
            expect(comp <= bound + 1e-12, "gns compression below sqrt(1/n)");
        }
        expect(rows == 3, "oddness prints one row per n");
        expect(run("oddness --n-list 42").status == 4, "oddness capacity exits 4");
    }

    std::printf("cli_tests: %d checks, %d failures\n", checks, failures);
    return failures == 0 ? 0 : 1;
}
