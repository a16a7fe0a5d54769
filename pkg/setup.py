"""
Instalador y verificación del entorno del laboratorio q-PushASEP.

Uso:
    python setup.py install   # pip install -r requirements.txt
    python setup.py verify    # versiones instaladas frente a requirements.txt
    python setup.py test      # suite de pytest
    python setup.py demo      # batería de aceptación, perfil rápido
    python setup.py all       # todo lo anterior salvo la demo
"""

import sys
import subprocess
from importlib import metadata
from pathlib import Path


class InstaladorLaboratorio:
    """Prepara el entorno y ejecuta las comprobaciones del laboratorio."""

    def __init__(self):
        self.raiz = Path(__file__).parent
        self.requisitos = self.raiz / 'requirements.txt'
        self.resultados = self.raiz / 'resultados'

    def leer_requisitos(self):
        """Pares (paquete, versión mínima) de requirements.txt."""
        pares = []
        for linea in self.requisitos.read_text(encoding='utf-8').splitlines():
            linea = linea.split('#')[0].strip()
            if not linea:
                continue
            paquete, _, minima = linea.partition('>=')
            pares.append((paquete.strip(), minima.strip() or None))
        return pares

    def preparar_resultados(self):
        self.resultados.mkdir(exist_ok=True)
        print(f"\n📁 Directorio de resultados: {self.resultados}")

    def instalar_dependencias(self):
        print("\n📦 Instalando dependencias de requirements.txt...")
        if not self.requisitos.exists():
            print("  ⚠️  No se encontró requirements.txt")
            return False
        try:
            subprocess.check_call([sys.executable, '-m', 'pip', 'install', '-r', str(self.requisitos)])
        except subprocess.CalledProcessError as e:
            print(f"\n❌ pip terminó con error: {e}")
            return False
        print("\n✓ Dependencias instaladas")
        return True

    def verificar_instalacion(self):
        """Comprueba que cada paquete esté instalado con al menos la versión pedida."""
        print("\n🔍 Versiones instaladas:")
        completo = True
        for paquete, minima in self.leer_requisitos():
            try:
                version = metadata.version(paquete)
            except metadata.PackageNotFoundError:
                print(f"  ❌ {paquete:<8} no instalado (se requiere ≥ {minima})")
                completo = False
                continue
            suficiente = minima is None or _tupla_version(version) >= _tupla_version(minima)
            marca = '✓' if suficiente else '❌'
            print(f"  {marca} {paquete:<8} {version} (mínimo {minima})")
            completo = completo and suficiente

        if not completo:
            print("\n⚠️  Entorno incompleto. Ejecute: python setup.py install")
        return completo

    def ejecutar_tests(self):
        print("\n🧪 pytest tests/")
        codigo = subprocess.call([sys.executable, '-m', 'pytest', '-q', str(self.raiz / 'tests')])
        if codigo != 0:
            print(f"\n❌ pytest terminó con código {codigo}")
        return codigo == 0

    def ejecutar_demo(self):
        """Batería de aceptación rápida; guarda la tabla en resultados/."""
        print("\n🎬 Batería de aceptación (perfil rápido)")
        print("="*70)
        sys.path.insert(0, str(self.raiz))
        from simulation.runner import RunnerExperimentos

        tabla = RunnerExperimentos().ejecutar_aceptacion('rapido', verbose=True)
        self.preparar_resultados()
        destino = self.resultados / 'aceptacion_rapida.csv'
        tabla.to_csv(destino, index=False)

        fallos = tabla[tabla['fatal'] & ~tabla['aprobado']]
        print("="*70)
        if fallos.empty:
            print(f"✓ Todos los criterios fatales aprobados ({destino.name})")
        else:
            print(f"❌ Criterios fatales fallidos: {', '.join(fallos['criterio'])}")
        return fallos.empty

    def mostrar_ayuda(self):
        print(__doc__)


def _tupla_version(texto):
    partes = []
    for parte in texto.split('.')[:3]:
        digitos = ''.join(c for c in parte if c.isdigit())
        partes.append(int(digitos or 0))
    return tuple(partes)


def main():
    instalador = InstaladorLaboratorio()
    comando = sys.argv[1].lower() if len(sys.argv) > 1 else 'help'

    acciones = {
        'install': instalador.instalar_dependencias,
        'verify': instalador.verificar_instalacion,
        'test': instalador.ejecutar_tests,
        'demo': instalador.ejecutar_demo,
    }
    if comando == 'all':
        instalador.preparar_resultados()
        ok = instalador.instalar_dependencias() and instalador.verificar_instalacion() \
            and instalador.ejecutar_tests()
    elif comando in acciones:
        ok = acciones[comando]()
    else:
        if comando != 'help':
            print(f"\n❌ Comando desconocido: {comando}")
        instalador.mostrar_ayuda()
        ok = comando == 'help'
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
