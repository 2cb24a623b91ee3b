/* Demo: the tangle invariant with three coefficient modules.
 *
 * Takes the left trefoil cut open along one arc and computes H^i(D, M)
 * for the free module, the module with c killed, and a module with
 * 2-torsion.  The three outputs restate the module itself in degrees
 * shifted by the tangle: slices of M at i = 0, of M/2XM at i = -2, and
 * of ker 2X at i = -3.  Build and run:
 *
 *   cmake --build build --target demo_tangle_modules
 *   ./build/demo_tangle_modules
 */

#include <linkhom/fixtures.hpp>
#include <linkhom/tangle.hpp>

#include <json.hpp>

#include <cstdio>

using namespace linkhom;

int main() {
    Diagram d = Diagram::parse_pd(fixtures::trefoil_tangle_pd());
    struct Named {
        const char* name;
        const char* text;
    };
    Named modules[3] = {{"free module A", fixtures::module_a_json()},
                        {"A with c = 0", fixtures::module_a_c0_json()},
                        {"2-torsion module", fixtures::module_2tor_json()}};
    for (const auto& nm : modules) {
        GradedModule m = GradedModule::from_json(nlohmann::json::parse(nm.text));
        auto [jlo, jhi] = default_window_tangle(d, m);
        std::printf("%s, window [%d, %d]:\n", nm.name, jlo, jhi);
        BigradedGroups h = tangle_homology(d, m, jlo, jhi);
        for (const auto& [ij, g] : h.groups)
            std::printf("  H^{%d,%d} = %s\n", ij.first, ij.second, g.str().c_str());
        std::printf("\n");
    }
    return 0;
}
