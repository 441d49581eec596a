import { runFigureCli } from "../cli.js";

process.exit(runFigureCli("transform-arrows", process.argv.slice(2)));
