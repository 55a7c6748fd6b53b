// Writes the synthetic test meshes used by the tests and examples.

#include "meshwm/error.hpp"
#include "meshwm/synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Synthetic test meshes"};
    std::string kind = "sphere", out;
    std::uint64_t seed = 1;
    unsigned resolution = 0;
    app.add_option("kind", kind, "sphere, terrain or torus")->check(CLI::IsMember({"sphere", "terrain", "torus"}));
    app.add_option("-o,--out", out, "OBJ output")->required();
    app.add_option("--seed", seed, "feature seed");
    app.add_option("--resolution", resolution, "sphere frequency, terrain grid size or torus major samples");
    CLI11_PARSE(app, argc, argv);

    try {
        meshwm::Mesh mesh;
        if (kind == "sphere")
            mesh = meshwm::make_feature_sphere(seed, resolution ? resolution : 55);
        else if (kind == "terrain")
            mesh = meshwm::make_terrain(seed, resolution ? resolution : 173);
        else
            mesh = resolution ? meshwm::make_spiky_torus(seed, resolution, (resolution + 1) / 2)
                              : meshwm::make_spiky_torus(seed);
        meshwm::write_obj_file(mesh, out);
        std::cerr << mesh.vertex_count() << " vertices, " << mesh.face_count() << " faces\n";
    } catch (const meshwm::Error& e) {
        std::cerr << "meshwm_synth: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
