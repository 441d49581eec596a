import { runFigureCli } from "../cli.js";

process.exit(runFigureCli("phase-portrait", process.argv.slice(2)));
